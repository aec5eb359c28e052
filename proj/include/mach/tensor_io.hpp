#pragma once

#include "mach/bounds.hpp"
#include "mach/metrics.hpp"
#include "mach/tensor.hpp"
#include "mach/tucker.hpp"

#include <string>
#include <variant>

namespace mach {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

using AnyTensor = std::variant<DenseTensor, SparseTensor>;

/// Text tensor files. Dense: header line "dims: I1 I2 ... Id", then the
/// values with the first index varying fastest, one mode-1 fiber per line.
/// Sparse: header line "sparse dims: I1 ... Id", then one "i1 ... id value"
/// line per nonzero with 1-based indices; duplicate index lines sum.
/// Roundtrips are value-exact. Malformed content raises ParseError with the
/// line number; unreadable or unwritable paths raise IoError.
AnyTensor read_tensor(const std::string& path);
void write_tensor(const DenseTensor& t, const std::string& path);
void write_tensor(const SparseTensor& t, const std::string& path);

/// A matrix file is an order-2 dense tensor file; rows vary fastest, so each
/// body line is one column.
Matrix read_matrix(const std::string& path);
void write_matrix(const Matrix& m, const std::string& path);

/// Model persistence: a directory holding "core" (tensor file), "factor_1"
/// ... "factor_d" (matrix files), and "metadata" (ranks, iterations, fit,
/// per-sweep fits, warnings). Numeric fields roundtrip exactly.
void save_model(const TuckerModel& model, const std::string& dir);
TuckerModel load_model(const std::string& dir);

/// Flat key-value rendering, one "name = value" line per quantity and one
/// "mode_i.name = value" line per per-mode quantity. A shape-only bound
/// report (empty per_mode) omits the tensor-dependent b and t lines.
std::string render_bound_report(const BoundReport& rep);
std::string render_comparison_report(const ComparisonReport& rep);
void write_bound_report(const BoundReport& rep, const std::string& path);
void write_comparison_report(const ComparisonReport& rep, const std::string& path);

}  // namespace mach
