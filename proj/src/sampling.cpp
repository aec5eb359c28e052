#include "mach/sampling.hpp"

#include "internal.hpp"
#include "mach/errors.hpp"

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace mach {

namespace {

void check_sparsify_config(const SparsifyConfig& cfg) {
    if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw ArgumentError("p must be in (0, 1]");
}

}  // namespace

SparseTensor sparsify(const DenseTensor& t, const SparsifyConfig& cfg) {
    check_sparsify_config(cfg);
    std::vector<SparseEntry> kept;
    const double* v = t.data();
    for (std::int64_t i = 0; i < t.size(); ++i) {
        if (v[i] == 0.0) continue;
        if (detail::counter_uniform01(cfg.seed, static_cast<std::uint64_t>(i)) < cfg.p)
            kept.push_back({i, v[i] / cfg.p});
    }
    return SparseTensor(t.dims(), std::move(kept));
}

MachResult mach_hosvd(const DenseTensor& t, const std::vector<int>& ranks,
                      const SparsifyConfig& cfg) {
    MachResult result;
    result.sparsified = sparsify(t, cfg);
    result.model = hosvd(result.sparsified, ranks);
    return result;
}

MachResult mach_hooi(const DenseTensor& t, const std::vector<int>& ranks,
                     const SparsifyConfig& scfg, const HooiConfig& hcfg) {
    MachResult result;
    result.sparsified = sparsify(t, scfg);
    result.model = hooi(result.sparsified, ranks, hcfg);
    return result;
}

}  // namespace mach
