#include "mach/tensor_io.hpp"

#include "mach/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace mach {
namespace {

std::vector<std::string_view> tokens_of(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::int64_t parse_int(std::string_view tok, long line_no) {
    std::int64_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError("bad integer '" + std::string(tok) + "'", line_no);
    return v;
}

double parse_value(std::string_view tok, long line_no) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError("bad value '" + std::string(tok) + "'", line_no);
    if (!std::isfinite(v))
        throw ParseError("value '" + std::string(tok) + "' is not finite", line_no);
    return v;
}

bool next_line(std::ifstream& in, std::string& line, long& line_no) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::vector<int> parse_dims(std::string_view rest, long line_no) {
    const std::vector<std::string_view> toks = tokens_of(rest);
    if (toks.empty()) throw ParseError("header lists no dimensions", line_no);
    std::vector<int> dims;
    std::int64_t total = 1;
    for (std::string_view t : toks) {
        const std::int64_t v = parse_int(t, line_no);
        if (v < 1) throw ParseError("dimensions must be positive", line_no);
        if (v > std::numeric_limits<int>::max() ||
            total > std::numeric_limits<std::int64_t>::max() / v)
            throw ParseError("dimensions overflow", line_no);
        total *= v;
        dims.push_back(static_cast<int>(v));
    }
    return dims;
}

void write_header_and_body(std::ofstream& out, const std::vector<int>& dims, const double* v,
                           std::int64_t size) {
    out << "dims:";
    for (int d : dims) out << ' ' << d;
    out << '\n';
    const std::int64_t fiber = dims[0];
    for (std::int64_t i = 0; i < size;) {
        for (std::int64_t r = 0; r < fiber; ++r, ++i) {
            if (r) out << ' ';
            out << format_double(v[i]);
        }
        out << '\n';
    }
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

AnyTensor read_tensor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    long line_no = 0;
    if (!next_line(in, line, line_no)) throw ParseError("missing header", 1);
    std::string_view header(line);
    bool sparse = false;
    if (header.starts_with("sparse dims:")) {
        sparse = true;
        header.remove_prefix(12);
    } else if (header.starts_with("dims:")) {
        header.remove_prefix(5);
    } else {
        throw ParseError("expected 'dims:' or 'sparse dims:' header", 1);
    }
    const std::vector<int> dims = parse_dims(header, 1);
    std::int64_t total = 1;
    for (int d : dims) total *= d;

    if (sparse) {
        std::vector<std::pair<std::vector<int>, double>> entries;
        while (next_line(in, line, line_no)) {
            const std::vector<std::string_view> toks = tokens_of(line);
            if (toks.empty()) continue;
            if (toks.size() != dims.size() + 1)
                throw ParseError("expected " + std::to_string(dims.size()) +
                                     " indices and a value, got " + std::to_string(toks.size()) +
                                     " tokens",
                                 line_no);
            std::vector<int> idx(dims.size());
            for (std::size_t m = 0; m < dims.size(); ++m) {
                const std::int64_t v = parse_int(toks[m], line_no);
                if (v < 1 || v > dims[m])
                    throw ParseError("index " + std::to_string(v) + " outside [1, " +
                                         std::to_string(dims[m]) + "]",
                                     line_no);
                idx[m] = static_cast<int>(v - 1);
            }
            entries.emplace_back(std::move(idx), parse_value(toks.back(), line_no));
        }
        return SparseTensor(dims, entries);
    }

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(total));
    while (next_line(in, line, line_no)) {
        for (std::string_view t : tokens_of(line)) {
            if (static_cast<std::int64_t>(values.size()) == total)
                throw ParseError("more than " + std::to_string(total) + " values", line_no);
            values.push_back(parse_value(t, line_no));
        }
    }
    if (static_cast<std::int64_t>(values.size()) != total)
        throw ParseError("expected " + std::to_string(total) + " values, found " +
                             std::to_string(values.size()),
                         line_no == 0 ? 1 : line_no);
    return DenseTensor(dims, std::move(values));
}

void write_tensor(const DenseTensor& t, const std::string& path) {
    if (t.order() < 1) throw ArgumentError("cannot serialize an order-0 tensor");
    std::ofstream out = open_for_write(path);
    write_header_and_body(out, t.dims(), t.data(), t.size());
    finish_write(out, path);
}

void write_tensor(const SparseTensor& t, const std::string& path) {
    if (t.order() < 1) throw ArgumentError("cannot serialize an order-0 tensor");
    std::ofstream out = open_for_write(path);
    out << "sparse dims:";
    for (int d : t.dims()) out << ' ' << d;
    out << '\n';
    for (const SparseEntry& e : t.entries()) {
        for (int i : t.multi_index(e.index)) out << i + 1 << ' ';
        out << format_double(e.value) << '\n';
    }
    finish_write(out, path);
}

Matrix read_matrix(const std::string& path) {
    AnyTensor t = read_tensor(path);
    const DenseTensor* dense = std::get_if<DenseTensor>(&t);
    if (!dense || dense->order() != 2)
        throw ParseError("expected an order-2 dense tensor file at '" + path + "'", 1);
    return Matrix(dense->dim(0), dense->dim(1), dense->values());
}

void write_matrix(const Matrix& m, const std::string& path) {
    std::ofstream out = open_for_write(path);
    write_header_and_body(out, {m.rows(), m.cols()}, m.data(), m.size());
    finish_write(out, path);
}

void save_model(const TuckerModel& model, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
    write_tensor(model.core, dir + "/core");
    for (std::size_t m = 0; m < model.factors.size(); ++m)
        write_matrix(model.factors[m], dir + "/factor_" + std::to_string(m + 1));
    std::ofstream out = open_for_write(dir + "/metadata");
    out << "ranks:";
    for (int r : model.ranks) out << ' ' << r;
    out << '\n';
    out << "iterations: " << model.iterations << '\n';
    out << "fit: " << format_double(model.fit) << '\n';
    out << "sweep_fits:";
    for (double f : model.sweep_fits) out << ' ' << format_double(f);
    out << '\n';
    for (const std::string& w : model.warnings) out << "warning: " << w << '\n';
    finish_write(out, dir + "/metadata");
}

TuckerModel load_model(const std::string& dir) {
    const std::string meta_path = dir + "/metadata";
    std::ifstream in(meta_path);
    if (!in) throw IoError("cannot open '" + meta_path + "' for reading");
    TuckerModel model;
    std::string line;
    long line_no = 0;

    auto expect = [&](const char* prefix) -> std::string_view {
        if (!next_line(in, line, line_no))
            throw ParseError(std::string("missing '") + prefix + "' line", line_no + 1);
        std::string_view v(line);
        if (!v.starts_with(prefix))
            throw ParseError(std::string("expected '") + prefix + "' line", line_no);
        v.remove_prefix(std::string_view(prefix).size());
        return v;
    };

    auto single = [&](const char* prefix) -> std::string_view {
        const std::vector<std::string_view> toks = tokens_of(expect(prefix));
        if (toks.size() != 1)
            throw ParseError(std::string("expected one value after '") + prefix + "'", line_no);
        return toks[0];
    };

    for (std::string_view t : tokens_of(expect("ranks:"))) {
        const std::int64_t r = parse_int(t, line_no);
        if (r < 1) throw ParseError("ranks must be positive", line_no);
        model.ranks.push_back(static_cast<int>(r));
    }
    if (model.ranks.empty()) throw ParseError("ranks line lists no ranks", line_no);
    model.iterations = static_cast<int>(parse_int(single("iterations:"), line_no));
    model.fit = parse_value(single("fit:"), line_no);
    for (std::string_view t : tokens_of(expect("sweep_fits:")))
        model.sweep_fits.push_back(parse_value(t, line_no));
    while (next_line(in, line, line_no)) {
        std::string_view v(line);
        if (v.empty()) continue;
        if (!v.starts_with("warning: "))
            throw ParseError("expected 'warning: ' line", line_no);
        model.warnings.emplace_back(v.substr(9));
    }

    AnyTensor core = read_tensor(dir + "/core");
    DenseTensor* dense = std::get_if<DenseTensor>(&core);
    if (!dense || dense->order() != static_cast<int>(model.ranks.size()))
        throw ParseError("core does not match the ranks line of '" + meta_path + "'", 1);
    for (std::size_t m = 0; m < model.ranks.size(); ++m)
        if (dense->dim(static_cast<int>(m)) != model.ranks[m])
            throw ParseError("core does not match the ranks line of '" + meta_path + "'", 1);
    model.core = std::move(*dense);
    for (std::size_t m = 0; m < model.ranks.size(); ++m) {
        const std::string fpath = dir + "/factor_" + std::to_string(m + 1);
        model.factors.push_back(read_matrix(fpath));
        if (model.factors.back().cols() != model.ranks[m])
            throw ParseError("factor does not match the ranks line at '" + fpath + "'", 1);
    }
    return model;
}

namespace {

void kv(std::string& s, const std::string& key, const std::string& value) {
    s += key;
    s += " = ";
    s += value;
    s += '\n';
}

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string render_bound_report(const BoundReport& rep) {
    // A shape-only report carries no tensor-dependent quantities; b and t
    // would be zero placeholders, so they are omitted along with the modes.
    const bool evaluated = !rep.per_mode.empty();
    std::string s;
    if (evaluated) kv(s, "b", format_double(rep.b));
    kv(s, "p", format_double(rep.p));
    kv(s, "p_min", format_double(rep.p_min));
    if (evaluated) kv(s, "t", format_double(rep.t));
    kv(s, "success_probability", format_double(rep.success_probability));
    kv(s, "dims_large_enough", flag(rep.dims_large_enough));
    kv(s, "dims_balanced", flag(rep.dims_balanced));
    kv(s, "p_above_min", flag(rep.p_above_min));
    kv(s, "conditions_met", flag(rep.conditions_met));
    for (std::size_t i = 0; i < rep.per_mode.size(); ++i) {
        const std::string prefix = "mode_" + std::to_string(i + 1) + ".";
        const BoundModeReport& m = rep.per_mode[i];
        kv(s, prefix + "rank", std::to_string(m.rank));
        kv(s, prefix + "x_residual", format_double(m.x_residual));
        kv(s, prefix + "xhat_residual", format_double(m.xhat_residual));
        kv(s, prefix + "x_lowrank_norm", format_double(m.x_lowrank_norm));
        kv(s, prefix + "t_i", format_double(m.t_i));
    }
    return s;
}

std::string render_comparison_report(const ComparisonReport& rep) {
    std::string s;
    kv(s, "accuracy_exact", format_double(rep.accuracy_exact));
    kv(s, "accuracy_mach", format_double(rep.accuracy_mach));
    kv(s, "core_exact", format_double(rep.core_interaction.first));
    kv(s, "core_mach", format_double(rep.core_interaction.second));
    for (std::size_t i = 0; i < rep.per_mode_rho.size(); ++i) {
        const std::string prefix = "mode_" + std::to_string(i + 1) + ".";
        kv(s, prefix + "rho", format_double(rep.per_mode_rho[i]));
        kv(s, prefix + "flipped", flag(rep.flipped[i]));
        kv(s, prefix + "tied", flag(rep.tied[i]));
        kv(s, prefix + "tie_subspace_sin", format_double(rep.tie_subspace_sin[i]));
    }
    return s;
}

void write_bound_report(const BoundReport& rep, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << render_bound_report(rep);
    finish_write(out, path);
}

void write_comparison_report(const ComparisonReport& rep, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << render_comparison_report(rep);
    finish_write(out, path);
}

}  // namespace mach
