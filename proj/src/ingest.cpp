#include "mach/ingest.hpp"

#include "mach/errors.hpp"
#include "mach/tensor_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mach {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::map<std::string, int> index_of(const std::vector<std::string>& order, const char* what) {
    std::map<std::string, int> m;
    for (std::size_t i = 0; i < order.size(); ++i)
        if (!m.emplace(order[i], static_cast<int>(i)).second)
            throw ArgumentError(std::string(what) + " ordering repeats '" + order[i] + "'");
    return m;
}

std::vector<std::string> sorted_names(const std::vector<MeasurementRecord>& records,
                                      std::string MeasurementRecord::* field) {
    std::set<std::string> s;
    for (const auto& r : records) s.insert(r.*field);
    return {s.begin(), s.end()};
}

void check_name(const std::string& name, const char* what) {
    if (name.empty()) throw ArgumentError(std::string(what) + " must be nonempty");
    if (name.find_first_of(",\n\r") != std::string::npos)
        throw ArgumentError(std::string(what) + " '" + name +
                            "' may not contain commas or line breaks");
}

}  // namespace

IngestResult ingest(const std::vector<MeasurementRecord>& records, const TensorBuildSpec& spec) {
    if (records.empty()) throw ArgumentError("no records to ingest");
    if (spec.time_bucket_seconds <= 0)
        throw ArgumentError("time_bucket_seconds must be positive");
    for (const auto& r : records)
        if (!std::isfinite(r.value))
            throw ArgumentError("record value for machine '" + r.machine_id +
                                "' metric '" + r.metric + "' is not finite");

    IngestResult out;
    out.machines = spec.machine_order.empty() ? sorted_names(records, &MeasurementRecord::machine_id)
                                              : spec.machine_order;
    out.metrics = spec.metric_order.empty() ? sorted_names(records, &MeasurementRecord::metric)
                                            : spec.metric_order;
    const std::map<std::string, int> machine_index = index_of(out.machines, "machine");
    const std::map<std::string, int> metric_index = index_of(out.metrics, "metric");

    std::int64_t min_ts = records.front().timestamp;
    std::int64_t max_ts = min_ts;
    for (const auto& r : records) {
        min_ts = std::min(min_ts, r.timestamp);
        max_ts = std::max(max_ts, r.timestamp);
    }
    const std::int64_t first_bucket =
        floor_div(min_ts, spec.time_bucket_seconds) * spec.time_bucket_seconds;
    const std::int64_t buckets =
        floor_div(max_ts - first_bucket, spec.time_bucket_seconds) + 1;

    const std::int64_t n_machines = static_cast<std::int64_t>(out.machines.size());
    const std::int64_t n_metrics = static_cast<std::int64_t>(out.metrics.size());
    out.tensor = DenseTensor(std::vector<int>{static_cast<int>(n_machines),
                                              static_cast<int>(n_metrics),
                                              static_cast<int>(buckets)});
    out.bucket_starts.resize(static_cast<std::size_t>(buckets));
    for (std::int64_t t = 0; t < buckets; ++t)
        out.bucket_starts[static_cast<std::size_t>(t)] =
            first_bucket + t * spec.time_bucket_seconds;

    // Sorting by (cell, value) before accumulating makes the cell means
    // independent of record order.
    std::vector<std::pair<std::int64_t, double>> cells;
    cells.reserve(records.size());
    for (const auto& r : records) {
        const auto mi = machine_index.find(r.machine_id);
        if (mi == machine_index.end())
            throw ArgumentError("unknown machine '" + r.machine_id + "'");
        const auto ji = metric_index.find(r.metric);
        if (ji == metric_index.end()) throw ArgumentError("unknown metric '" + r.metric + "'");
        const std::int64_t t = floor_div(r.timestamp - first_bucket, spec.time_bucket_seconds);
        cells.emplace_back(mi->second + n_machines * (ji->second + n_metrics * t), r.value);
    }
    std::sort(cells.begin(), cells.end());

    double* data = out.tensor.data();
    std::vector<char> filled(static_cast<std::size_t>(out.tensor.size()), 0);
    for (std::size_t i = 0; i < cells.size();) {
        const std::int64_t cell = cells[i].first;
        double sum = 0.0;
        std::int64_t count = 0;
        while (i < cells.size() && cells[i].first == cell) {
            sum += cells[i++].second;
            ++count;
        }
        data[cell] = sum / static_cast<double>(count);
        filled[static_cast<std::size_t>(cell)] = 1;
    }

    if (spec.missing_policy == MissingPolicy::carry_forward) {
        for (std::int64_t m = 0; m < n_machines; ++m)
            for (std::int64_t j = 0; j < n_metrics; ++j) {
                double last = 0.0;
                bool seen = false;
                for (std::int64_t t = 0; t < buckets; ++t) {
                    const std::int64_t cell = m + n_machines * (j + n_metrics * t);
                    if (filled[static_cast<std::size_t>(cell)]) {
                        last = data[cell];
                        seen = true;
                    } else if (seen) {
                        data[cell] = last;
                    }
                }
            }
    }
    return out;
}

std::vector<MeasurementRecord> read_measurements_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty measurement file", 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "machine_id,metric,timestamp,value")
        throw ParseError("expected header machine_id,metric,timestamp,value", line_no);

    std::vector<MeasurementRecord> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const std::size_t comma = rest.find(',');
            if (comma == std::string_view::npos) {
                fields.push_back(rest);
                break;
            }
            fields.push_back(rest.substr(0, comma));
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 4)
            throw ParseError("expected 4 comma-separated fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        if (fields[0].empty() || fields[1].empty())
            throw ParseError("machine_id and metric must be nonempty", line_no);
        MeasurementRecord r;
        r.machine_id = std::string(fields[0]);
        r.metric = std::string(fields[1]);
        auto ts = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(),
                                  r.timestamp);
        if (ts.ec != std::errc{} || ts.ptr != fields[2].data() + fields[2].size())
            throw ParseError("bad timestamp '" + std::string(fields[2]) + "'", line_no);
        auto val = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(),
                                   r.value);
        if (val.ec != std::errc{} || val.ptr != fields[3].data() + fields[3].size() ||
            !std::isfinite(r.value))
            throw ParseError("bad value '" + std::string(fields[3]) + "'", line_no);
        out.push_back(std::move(r));
    }
    return out;
}

void write_measurements_csv(const std::vector<MeasurementRecord>& records,
                            const std::string& path) {
    for (const auto& r : records) {
        check_name(r.machine_id, "machine_id");
        check_name(r.metric, "metric");
        if (!std::isfinite(r.value)) throw ArgumentError("record values must be finite");
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "machine_id,metric,timestamp,value\n";
    for (const auto& r : records)
        out << r.machine_id << ',' << r.metric << ',' << r.timestamp << ','
            << format_double(r.value) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace mach
