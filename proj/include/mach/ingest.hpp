#pragma once

#include "mach/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mach {

/// One monitoring observation: which machine, which metric, when, what value.
struct MeasurementRecord {
    std::string machine_id;
    std::string metric;
    std::int64_t timestamp = 0;  // epoch seconds
    double value = 0.0;          // must be finite
};

/// How cells with no observations are filled: left at zero, or copied from
/// the same machine/metric's latest earlier bucket (cells before the first
/// observation stay zero).
enum class MissingPolicy { zero, carry_forward };

/// Layout of the machines x metrics x time tensor built by ingest. Empty
/// orderings mean "every name seen in the data, lexicographically"; explicit
/// orderings fix the axis and reject records naming anything else.
struct TensorBuildSpec {
    std::int64_t time_bucket_seconds = 300;
    MissingPolicy missing_policy = MissingPolicy::zero;
    std::vector<std::string> machine_order;
    std::vector<std::string> metric_order;
};

/// The built tensor plus the axis labels: machine ids, metric names, and the
/// epoch-second start of each time bucket (ascending, contiguous).
struct IngestResult {
    DenseTensor tensor;
    std::vector<std::string> machines;
    std::vector<std::string> metrics;
    std::vector<std::int64_t> bucket_starts;
};

/// Buckets records into a machines x metrics x time tensor. Multiple records
/// landing in one cell are averaged; the result is independent of record
/// order. Buckets are aligned to multiples of the bucket length and span the
/// observed time range contiguously.
IngestResult ingest(const std::vector<MeasurementRecord>& records, const TensorBuildSpec& spec);

/// CSV with header line machine_id,metric,timestamp,value. Names must be
/// nonempty and free of commas and line breaks; values must be finite.
std::vector<MeasurementRecord> read_measurements_csv(const std::string& path);
void write_measurements_csv(const std::vector<MeasurementRecord>& records,
                            const std::string& path);

}  // namespace mach
