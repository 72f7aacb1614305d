/* C interface to the identity-clone detection library.
 *
 * All functions return a cdt_status; on failure cdt_last_error() describes
 * what went wrong (thread-local, valid until the next call on that thread).
 * Objects returned through out-parameters are owned by the caller and
 * released with the matching _free function. Passing NULL where an object
 * is required fails with CDT_ERROR_INVALID_ARGUMENT, never crashes.
 */
#ifndef CLONEDET_H
#define CLONEDET_H

#define CDT_VERSION_STRING "1.0.0"

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CDT_API __declspec(dllexport)
#else
#define CDT_API __attribute__((visibility("default")))
#endif

typedef enum cdt_status {
  CDT_OK = 0,
  CDT_ERROR_INVALID_ARGUMENT = 1, /* bad parameter or malformed input */
  CDT_ERROR_RUNTIME = 2,          /* I/O failure or computation error */
  CDT_ERROR_NO_MEMORY = 3
} cdt_status;

typedef struct cdt_dataset cdt_dataset; /* accounts, interactions, labels */
typedef struct cdt_bundle cdt_bundle;   /* a trained detection model */

typedef struct cdt_metrics {
  double precision;
  double recall;
  double f1;
  long long tp;
  long long fp;
  long long fn;
  long long tn;
} cdt_metrics;

/* Library version string (CDT_VERSION_STRING of the loaded build). */
CDT_API const char* cdt_version(void);

/* Message for the most recent failing call on this thread; empty after a
 * success. The pointer stays valid until the thread's next library call. */
CDT_API const char* cdt_last_error(void);

/* ------------------------------------------------------------------ */
/* Datasets                                                           */
/* ------------------------------------------------------------------ */

/* Deterministic synthetic dataset: `legitimate` organic accounts plus
 * `noise` independent extras, with `clone_pairs` of the organic accounts
 * cloned and labeled. */
CDT_API cdt_status cdt_dataset_generate(long long legitimate, long long clone_pairs,
                                        long long noise, unsigned long long seed,
                                        cdt_dataset** out);

/* Reads accounts.jsonl, edges.tsv, labels.tsv and manifest.json from dir
 * (labels and manifest are optional). */
CDT_API cdt_status cdt_dataset_load(const char* dir, cdt_dataset** out);

/* Writes the four dataset files into dir, creating it if needed. */
CDT_API cdt_status cdt_dataset_save(const cdt_dataset* dataset, const char* dir);

CDT_API long long cdt_dataset_account_count(const cdt_dataset* dataset);
CDT_API long long cdt_dataset_edge_count(const cdt_dataset* dataset);
CDT_API long long cdt_dataset_label_count(const cdt_dataset* dataset);

CDT_API void cdt_dataset_free(cdt_dataset* dataset);

/* ------------------------------------------------------------------ */
/* Candidate graph                                                    */
/* ------------------------------------------------------------------ */

/* Connects account pairs whose username or screen-name similarity reaches
 * delta. When out_path is non-NULL the edge list is written there as
 * "id_a<TAB>id_b<TAB>username_sim<TAB>screen_name_sim". edge_count may be
 * NULL. */
CDT_API cdt_status cdt_build_graph(const cdt_dataset* dataset, double delta, const char* out_path,
                                   long long* edge_count);

/* ------------------------------------------------------------------ */
/* Training and persistence                                           */
/* ------------------------------------------------------------------ */

/* Trains a detection model. config_json is NULL, "", or a JSON object with
 * any of (defaults in parentheses):
 *   "delta" (0.8)                    candidate-graph threshold
 *   "post_embedding_dim" (256)      "post_embedding_seed" (0)
 *   "external_embeddings_path" ("") per-account post vectors file
 *   "node2vec" {...}                 any of return_p (0.5), in_out_q (2.0),
 *                                    walks_per_node (10), walk_length (15),
 *                                    dimension (128), window (5),
 *                                    negative_samples (5), epochs (5),
 *                                    learning_rate (0.025)
 *   "wgcca_weights" ([0.25,0.5,0.5,0.25])  post, follower, friend, profile
 *   "latent_dim" (64)                "wgcca_ridge" (-1 = automatic)
 *   "ablation" ("full")              "gc" | "account" | "wgcca" | "full"
 *   "cascade" ("default")            "default" | "rf" | "ert" | "lr"
 *   "folds" (5)                      "max_levels" (20)
 *   "improvement_tolerance" (1e-3)   "validation_fraction" (0.2)
 *   "train_fraction" (0.8)           "seed" (0)
 * Unknown keys are rejected. */
CDT_API cdt_status cdt_train(const cdt_dataset* dataset, const char* config_json,
                             cdt_bundle** out);

CDT_API cdt_status cdt_bundle_save(const cdt_bundle* bundle, const char* path);
CDT_API cdt_status cdt_bundle_load(const char* path, cdt_bundle** out);
CDT_API void cdt_bundle_free(cdt_bundle* bundle);

/* ------------------------------------------------------------------ */
/* Prediction and evaluation                                          */
/* ------------------------------------------------------------------ */

/* Scores every candidate pair of the dataset. When out_path is non-NULL the
 * predictions are written there as "id_a<TAB>id_b<TAB>probability<TAB>label"
 * with 4-decimal probabilities. embeddings_path supplies external post
 * vectors and is required iff the model was trained with them. pair_count
 * may be NULL. */
CDT_API cdt_status cdt_predict(const cdt_bundle* bundle, const cdt_dataset* dataset,
                               const char* embeddings_path, const char* out_path,
                               long long* pair_count);

/* Precision/recall/F1 of the model on the dataset. holdout != 0 restricts
 * scoring to the pairs the model recorded as held out at training time;
 * holdout == 0 scores every candidate pair against the dataset's labels.
 * Labeled pairs the candidate graph misses count as misses. */
CDT_API cdt_status cdt_evaluate(const cdt_bundle* bundle, const cdt_dataset* dataset,
                                const char* embeddings_path, int holdout, cdt_metrics* out);

#ifdef __cplusplus
}
#endif

#endif /* CLONEDET_H */
