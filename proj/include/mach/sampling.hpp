#pragma once

#include "mach/tensor.hpp"
#include "mach/tucker.hpp"

#include <cstdint>
#include <vector>

namespace mach {

/// Entrywise sparsification settings: keep each entry with probability p and
/// rescale it by 1/p. The stream is a pure function of (seed, entry index),
/// so results do not depend on traversal order or thread count.
struct SparsifyConfig {
    double p = 1.0;
    std::uint64_t seed = 0;
};

/// Bernoulli sparsification with 1/p reweighting. Zero entries are never
/// emitted (keeping one is a no-op). At p = 1 the output densifies back to
/// the input bit for bit.
SparseTensor sparsify(const DenseTensor& t, const SparsifyConfig& cfg);

/// A decomposition of the sparsified tensor, returned together with that
/// tensor for inspection. model.fit grades the model against the sparsified
/// values; use accuracy(original, model) to grade against the original.
struct MachResult {
    TuckerModel model;
    SparseTensor sparsified;
};

MachResult mach_hosvd(const DenseTensor& t, const std::vector<int>& ranks,
                      const SparsifyConfig& cfg);

MachResult mach_hooi(const DenseTensor& t, const std::vector<int>& ranks,
                     const SparsifyConfig& scfg, const HooiConfig& hcfg);

}  // namespace mach
