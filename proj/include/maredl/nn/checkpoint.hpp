#pragma once

#include <string>
#include <utility>

#include "maredl/nn/models.hpp"

namespace maredl::nn {

// Portable checkpoint encoding:
//   magic "EDLCKPT1"
//   u64 descriptor length, UTF-8 descriptor bytes
//   u64 array count
//   per array: u64 name length, name bytes, u64 rank, u64 dims..., f64 values
// All integers and doubles little-endian; values row-major.
std::string save_checkpoint(const WeightStore& weights,
                            const std::string& descriptor);

// Throws std::runtime_error on a bad magic, truncation, trailing bytes or an
// internal size mismatch; nothing partial is ever returned.
std::pair<WeightStore, std::string> load_checkpoint(const std::string& bytes);

// Model-level wrappers. The descriptor is JSON carrying the spec fields plus
// the training seed; loading validates array names/shapes against the spec.
std::string save_regressor_checkpoint(const RegressorSpec& spec,
                                      const WeightStore& weights);
std::pair<RegressorSpec, WeightStore> load_regressor_checkpoint(
    const std::string& bytes);

std::string save_classifier_checkpoint(const ClassifierSpec& spec,
                                       const WeightStore& weights);
std::pair<ClassifierSpec, WeightStore> load_classifier_checkpoint(
    const std::string& bytes);

// Peeks at the descriptor's "kind" field ("regressor" or "classifier").
std::string checkpoint_kind(const std::string& bytes);

}  // namespace maredl::nn
