#pragma once

#include "mach/ingest.hpp"
#include "mach/tensor.hpp"

#include <cstdint>
#include <vector>

namespace mach {

/// Cubic test tensor with entry 1/(i+j+k) at 1-based (i,j,k): smooth, fully
/// symmetric, and of rapidly decaying multilinear rank, so low-rank models
/// fit it to high accuracy.
DenseTensor synth_cauchy_tensor(int n);

/// Shape and texture of a generated monitoring stream. The signal is a near
/// rank-1 pattern (machine load x metric scale x diurnal cycle) with mild
/// relative noise. One machine can be made anomalous: its diurnal cycle is
/// replaced by a flat low level with sporadic bursts. gap_fraction drops
/// records at random to simulate collector dropouts. Fully determined by
/// seed.
struct StreamConfig {
    int machines = 30;
    int metrics = 8;
    int buckets = 480;
    int bucket_seconds = 300;
    std::int64_t start_timestamp = 1690000000;
    double gap_fraction = 0.0;  // in [0, 1)
    int anomaly_machine = -1;   // index, -1 for none
    std::uint64_t seed = 0;
};

/// One record per (machine, metric, bucket) minus seeded gaps, in time order.
std::vector<MeasurementRecord> synth_measurement_stream(const StreamConfig& cfg);

}  // namespace mach
