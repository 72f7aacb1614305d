#pragma once

#include "clonedet/dataset.hpp"

namespace clonedet {

// Deterministic synthetic dataset: n_legit organic accounts plus n_noise
// independent extras, with n_clone_pairs of the legitimate accounts cloned.
// Clones keep a near-copy of the victim's names (1-2 character edits), a
// word-dropout copy of the description, near-zero activity counts and almost
// none of the victim's network. Labels list the (victim, clone) pairs.
Dataset generate_synthetic(int n_legit, int n_clone_pairs, int n_noise,
                           unsigned long long seed);

}  // namespace clonedet
