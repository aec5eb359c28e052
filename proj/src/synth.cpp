#include "mach/synth.hpp"

#include "internal.hpp"
#include "mach/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mach {
namespace {

// Independent substreams of one seed, by purpose.
enum Stream : std::uint64_t { kLoad = 1, kScale, kNoise, kBurst, kGap };

double draw(const StreamConfig& cfg, Stream s, std::uint64_t counter) {
    return detail::counter_uniform01(detail::counter_hash64(cfg.seed, s), counter);
}

double gaussian(const StreamConfig& cfg, std::uint64_t counter) {
    const double u1 = draw(cfg, kNoise, 2 * counter);
    const double u2 = draw(cfg, kNoise, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string padded(const char* prefix, int index, int count) {
    int width = 1;
    for (int v = count; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    return prefix + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
}

std::string metric_name(int j, int count) {
    static const char* kNames[] = {"cpu",    "memory", "disk_read", "disk_write",
                                   "net_in", "net_out", "latency",   "power"};
    if (count <= 8) return kNames[j];
    return padded("metric_", j, count);
}

}  // namespace

DenseTensor synth_cauchy_tensor(int n) {
    if (n < 1) throw ArgumentError("tensor side must be at least 1, got " + std::to_string(n));
    DenseTensor t(std::vector<int>{n, n, n});
    double* v = t.data();
    std::int64_t f = 0;
    // First index fastest; the 1-based index sum is i + j + k + 3.
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) v[f++] = 1.0 / static_cast<double>(i + j + k + 3);
    return t;
}

std::vector<MeasurementRecord> synth_measurement_stream(const StreamConfig& cfg) {
    if (cfg.machines < 1 || cfg.metrics < 1 || cfg.buckets < 1 || cfg.bucket_seconds < 1)
        throw ArgumentError("stream shape fields must be positive");
    if (!(cfg.gap_fraction >= 0.0 && cfg.gap_fraction < 1.0))
        throw ArgumentError("gap_fraction must lie in [0, 1)");
    if (cfg.anomaly_machine < -1 || cfg.anomaly_machine >= cfg.machines)
        throw ArgumentError("anomaly_machine out of range");

    std::vector<double> load(static_cast<std::size_t>(cfg.machines));
    for (int i = 0; i < cfg.machines; ++i)
        load[static_cast<std::size_t>(i)] = 0.5 + draw(cfg, kLoad, static_cast<std::uint64_t>(i));
    std::vector<double> scale(static_cast<std::size_t>(cfg.metrics));
    for (int j = 0; j < cfg.metrics; ++j)
        scale[static_cast<std::size_t>(j)] = 1.0 + 9.0 * draw(cfg, kScale, static_cast<std::uint64_t>(j));

    std::vector<MeasurementRecord> out;
    out.reserve(static_cast<std::size_t>(cfg.machines) * static_cast<std::size_t>(cfg.metrics) *
                static_cast<std::size_t>(cfg.buckets));
    std::uint64_t counter = 0;
    for (int t = 0; t < cfg.buckets; ++t) {
        const std::int64_t ts =
            cfg.start_timestamp + static_cast<std::int64_t>(t) * cfg.bucket_seconds;
        const double day_angle = 2.0 * std::numbers::pi * static_cast<double>(ts) / 86400.0;
        const double diurnal = 1.0 + 0.4 * std::sin(day_angle);
        for (int i = 0; i < cfg.machines; ++i) {
            const bool anomalous = i == cfg.anomaly_machine;
            const double burst =
                anomalous && draw(cfg, kBurst, static_cast<std::uint64_t>(t)) < 0.03 ? 2.5 : 0.0;
            const double shape = anomalous ? 0.15 + burst : diurnal;
            for (int j = 0; j < cfg.metrics; ++j, ++counter) {
                if (cfg.gap_fraction > 0.0 && draw(cfg, kGap, counter) < cfg.gap_fraction)
                    continue;
                const double value = load[static_cast<std::size_t>(i)] *
                                     scale[static_cast<std::size_t>(j)] * shape *
                                     (1.0 + 0.05 * gaussian(cfg, counter));
                out.push_back({padded("machine_", i, cfg.machines), metric_name(j, cfg.metrics),
                               ts, value});
            }
        }
    }
    return out;
}

}  // namespace mach
