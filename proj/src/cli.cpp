#include "mach/cli.hpp"

#include "mach/bounds.hpp"
#include "mach/errors.hpp"
#include "mach/ingest.hpp"
#include "mach/linalg.hpp"
#include "mach/metrics.hpp"
#include "mach/sampling.hpp"
#include "mach/synth.hpp"
#include "mach/tensor.hpp"
#include "mach/tensor_io.hpp"
#include "mach/tucker.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mach {
namespace {

// Tensor files of either representation are accepted wherever the math does
// not care, so any subcommand's output feeds the next one.
DenseTensor as_dense(AnyTensor t) {
    if (auto* d = std::get_if<DenseTensor>(&t)) return std::move(*d);
    return densify(std::get<SparseTensor>(t));
}

SparseTensor as_sparse(AnyTensor t) {
    if (auto* s = std::get_if<SparseTensor>(&t)) return std::move(*s);
    return sparsify_exact(std::get<DenseTensor>(t));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

int fail(int code, const std::exception& e) {
    std::cerr << "mach: " << e.what() << '\n';
    return code;
}

int apply_thread_env() {
    const char* env = std::getenv("MACH_THREADS");
    if (env == nullptr) return 0;
    int n = 0;
    const char* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec != std::errc{} || ptr != end || n < 1) {
        std::cerr << "mach: MACH_THREADS must be a positive integer, not '" << env << "'\n";
        return 2;
    }
    set_thread_count(n);
    return 0;
}

// --- synth ---

struct SynthOpts {
    int n = 0;
    bool stream = false;
    StreamConfig cfg;
    std::string output;
};

void run_synth(const SynthOpts& o) {
    if (o.stream) {
        const std::vector<MeasurementRecord> records = synth_measurement_stream(o.cfg);
        write_measurements_csv(records, o.output);
        std::cout << "wrote " << o.output << " (" << records.size() << " records)\n";
        return;
    }
    if (o.n < 1) throw ArgumentError("synth needs --n or --stream");
    write_tensor(synth_cauchy_tensor(o.n), o.output);
    std::cout << "wrote " << o.output << '\n';
}

void add_synth(CLI::App& app) {
    auto o = std::make_shared<SynthOpts>();
    CLI::App* cmd = app.add_subcommand("synth", "Generate a test tensor or a monitoring stream CSV");
    CLI::Option* n =
        cmd->add_option("--n", o->n, "Side of the cubic 1/(i+j+k) tensor; writes a dense tensor file");
    CLI::Option* stream = cmd->add_flag("--stream", o->stream, "Write a measurement CSV instead");
    n->excludes(stream);
    cmd->add_option("--machines", o->cfg.machines, "Machine count")->needs(stream);
    cmd->add_option("--metrics", o->cfg.metrics, "Metric count")->needs(stream);
    cmd->add_option("--buckets", o->cfg.buckets, "Time bucket count")->needs(stream);
    cmd->add_option("--bucket-seconds", o->cfg.bucket_seconds, "Bucket length in seconds")->needs(stream);
    cmd->add_option("--start-timestamp", o->cfg.start_timestamp, "Epoch second of the first bucket")
        ->needs(stream);
    cmd->add_option("--gap", o->cfg.gap_fraction, "Fraction of records dropped at random")->needs(stream);
    cmd->add_option("--anomaly", o->cfg.anomaly_machine, "Machine index given an anomalous profile")
        ->needs(stream);
    cmd->add_option("--seed", o->cfg.seed, "Stream seed")->needs(stream);
    cmd->add_option("--output", o->output, "Output path")->required();
    cmd->callback([o] { run_synth(*o); });
}

// --- ingest ---

struct IngestOpts {
    std::string input;
    std::string output;
    std::string labels;
    std::string missing = "zero";
    std::int64_t bucket_seconds = 300;
};

void write_labels(const IngestResult& r, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const std::string& m : r.machines) out << "machine: " << m << '\n';
    for (const std::string& m : r.metrics) out << "metric: " << m << '\n';
    for (std::int64_t b : r.bucket_starts) out << "bucket_start: " << b << '\n';
    finish_out(out, path);
}

void run_ingest(const IngestOpts& o) {
    TensorBuildSpec spec;
    spec.time_bucket_seconds = o.bucket_seconds;
    spec.missing_policy =
        o.missing == "carry_forward" ? MissingPolicy::carry_forward : MissingPolicy::zero;
    const IngestResult r = ingest(read_measurements_csv(o.input), spec);
    write_tensor(r.tensor, o.output);
    if (!o.labels.empty()) write_labels(r, o.labels);
    std::cout << "wrote " << o.output << " (dims";
    for (int d : r.tensor.dims()) std::cout << ' ' << d;
    std::cout << ")\n";
    if (!o.labels.empty()) std::cout << "wrote " << o.labels << '\n';
}

void add_ingest(CLI::App& app) {
    auto o = std::make_shared<IngestOpts>();
    CLI::App* cmd =
        app.add_subcommand("ingest", "Bucket a measurement CSV into a machines x metrics x time tensor");
    cmd->add_option("--input", o->input, "Measurement CSV")->required();
    cmd->add_option("--output", o->output, "Tensor file to write")->required();
    cmd->add_option("--bucket-seconds", o->bucket_seconds, "Time bucket length in seconds");
    cmd->add_option("--missing", o->missing, "Fill policy for cells with no observations")
        ->check(CLI::IsMember({"zero", "carry_forward"}));
    cmd->add_option("--labels", o->labels, "Also write the axis labels to this path");
    cmd->callback([o] { run_ingest(*o); });
}

// --- sparsify ---

struct SparsifyOpts {
    std::string input;
    std::string output;
    SparsifyConfig cfg;
};

void run_sparsify(const SparsifyOpts& o) {
    const SparseTensor s = sparsify(as_dense(read_tensor(o.input)), o.cfg);
    write_tensor(s, o.output);
    std::cout << "wrote " << o.output << " (" << s.nnz() << " of " << s.size() << " entries kept)\n";
}

void add_sparsify(CLI::App& app) {
    auto o = std::make_shared<SparsifyOpts>();
    CLI::App* cmd = app.add_subcommand(
        "sparsify", "Keep each entry with probability p, rescaled by 1/p; write the sparse result");
    cmd->add_option("--input", o->input, "Tensor file to sample")->required();
    cmd->add_option("--p", o->cfg.p, "Keep probability in (0, 1]")->required();
    cmd->add_option("--seed", o->cfg.seed, "Sampling seed");
    cmd->add_option("--output", o->output, "Sparse tensor file to write")->required();
    cmd->callback([o] { run_sparsify(*o); });
}

// --- hosvd / hooi / mach-hosvd / mach-hooi ---

struct DecomposeOpts {
    std::string input;
    std::string output;
    std::string sparsified;
    std::vector<int> ranks;
    bool iterate = false;
    bool sample = false;
    SparsifyConfig scfg;
    HooiConfig hcfg;
};

TuckerModel decompose(const DecomposeOpts& o) {
    if (o.sample) {
        const DenseTensor x = as_dense(read_tensor(o.input));
        const MachResult r = o.iterate ? mach_hooi(x, o.ranks, o.scfg, o.hcfg)
                                       : mach_hosvd(x, o.ranks, o.scfg);
        if (!o.sparsified.empty()) write_tensor(r.sparsified, o.sparsified);
        return r.model;
    }
    const AnyTensor t = read_tensor(o.input);
    if (o.iterate) return std::visit([&](const auto& x) { return hooi(x, o.ranks, o.hcfg); }, t);
    return std::visit([&](const auto& x) { return hosvd(x, o.ranks); }, t);
}

void run_decompose(const DecomposeOpts& o) {
    const TuckerModel model = decompose(o);
    save_model(model, o.output);
    if (o.sample && !o.sparsified.empty()) std::cout << "wrote " << o.sparsified << '\n';
    std::cout << "wrote " << o.output << '\n';
    std::cout << "fit = " << format_double(model.fit) << '\n';
    for (const std::string& w : model.warnings) std::cout << "warning: " << w << '\n';
}

void add_decompose(CLI::App& app, bool iterate, bool sample) {
    auto o = std::make_shared<DecomposeOpts>();
    o->iterate = iterate;
    o->sample = sample;
    const std::string name = std::string(sample ? "mach-" : "") + (iterate ? "hooi" : "hosvd");
    const std::string what = iterate ? "Alternating least squares Tucker decomposition (HOOI)"
                                     : "Closed-form Tucker decomposition (HOSVD)";
    CLI::App* cmd = app.add_subcommand(
        name, sample ? what + ", run on an entrywise-sampled copy of the input" : what);
    cmd->add_option("--input", o->input, "Tensor file to decompose")->required();
    cmd->add_option("--ranks", o->ranks, "Per-mode target ranks, comma separated")
        ->required()
        ->delimiter(',');
    cmd->add_option("--output", o->output, "Model directory to write")->required();
    if (sample) {
        cmd->add_option("--p", o->scfg.p, "Keep probability in (0, 1]")->required();
        cmd->add_option("--seed", o->scfg.seed, "Sampling seed");
        cmd->add_option("--sparsified", o->sparsified, "Also write the sampled tensor to this path");
    }
    if (iterate) {
        cmd->add_option("--max-iters", o->hcfg.max_iterations, "Sweep budget");
        cmd->add_option("--fit-tol", o->hcfg.fit_tolerance,
                        "Stop once a sweep improves the fit by less than this");
    }
    cmd->callback([o] { run_decompose(*o); });
}

// --- compare ---

struct CompareOpts {
    std::string exact;
    std::string approx;
    std::string reference;
    std::string output;
};

void run_compare(const CompareOpts& o) {
    const TuckerModel exact = load_model(o.exact);
    const TuckerModel approx = load_model(o.approx);
    const DenseTensor reference = as_dense(read_tensor(o.reference));
    const ComparisonReport rep = compare(exact, approx, reference);
    write_comparison_report(rep, o.output);
    std::cout << render_comparison_report(rep);
    std::cout << "wrote " << o.output << '\n';
}

void add_compare(CLI::App& app) {
    auto o = std::make_shared<CompareOpts>();
    CLI::App* cmd = app.add_subcommand(
        "compare", "Correlate two models' leading components and grade both against a reference");
    cmd->add_option("--exact", o->exact, "Baseline model directory")->required();
    cmd->add_option("--approx", o->approx, "Model directory to grade")->required();
    cmd->add_option("--reference", o->reference, "Reference tensor file")->required();
    cmd->add_option("--output", o->output, "Report path")->required();
    cmd->callback([o] { run_compare(*o); });
}

// --- bound ---

struct BoundOpts {
    std::string input;
    std::string sparsified;
    std::string output;
    std::vector<int> dims;
    std::vector<int> ranks;
    double p = 0.0;
};

void run_bound(const BoundOpts& o) {
    BoundReport rep;
    if (!o.dims.empty()) {
        rep = theorem1_conditions(o.dims, o.p);
    } else {
        if (o.input.empty() || o.sparsified.empty() || o.ranks.empty())
            throw ArgumentError("bound needs either --dims or --input, --sparsified, and --ranks");
        rep = theorem1_bound(as_dense(read_tensor(o.input)), as_sparse(read_tensor(o.sparsified)),
                             o.ranks, o.p);
    }
    write_bound_report(rep, o.output);
    std::cout << render_bound_report(rep);
    std::cout << "wrote " << o.output << '\n';
}

void add_bound(CLI::App& app) {
    auto o = std::make_shared<BoundOpts>();
    CLI::App* cmd = app.add_subcommand(
        "bound", "Evaluate the sampled-reconstruction error bound and its applicability conditions");
    CLI::Option* dims =
        cmd->add_option("--dims", o->dims, "Check admissibility for these dimensions only, comma separated")
            ->delimiter(',');
    CLI::Option* input = cmd->add_option("--input", o->input, "Original tensor file");
    CLI::Option* sparsified = cmd->add_option("--sparsified", o->sparsified, "Sampled tensor file");
    CLI::Option* ranks =
        cmd->add_option("--ranks", o->ranks, "Per-mode ranks, comma separated")->delimiter(',');
    dims->excludes(input);
    dims->excludes(sparsified);
    dims->excludes(ranks);
    cmd->add_option("--p", o->p, "Keep probability in (0, 1]")->required();
    cmd->add_option("--output", o->output, "Report path")->required();
    cmd->callback([o] { run_bound(*o); });
}

// --- bench ---

struct BenchOpts {
    std::string input;
    std::string output;
    std::string timing;
    std::vector<int> ranks;
    SparsifyConfig scfg;
    HooiConfig hcfg;
};

template <typename F>
double median_seconds_of_three(F&& body) {
    std::array<double, 3> runs{};
    for (double& r : runs) {
        const auto start = std::chrono::steady_clock::now();
        body();
        r = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    std::sort(runs.begin(), runs.end());
    return runs[1];
}

void run_bench(const BenchOpts& o) {
    const DenseTensor x = as_dense(read_tensor(o.input));

    // Median of three runs, decomposition only; both pipelines inherit the
    // same thread settings. The runs are identical, so timing twice more
    // costs nothing but wall time.
    TuckerModel exact;
    const double exact_seconds = median_seconds_of_three([&] { exact = hooi(x, o.ranks, o.hcfg); });
    MachResult sampled;
    const double mach_seconds =
        median_seconds_of_three([&] { sampled = mach_hooi(x, o.ranks, o.scfg, o.hcfg); });
    const ComparisonReport rep = compare(exact, sampled.model, x);

    // The result rows are deterministic for a fixed invocation; wall times
    // are not, so they go to their own file.
    std::ofstream out = open_out(o.output);
    out << "p,accuracy_exact,accuracy_mach,core_exact,core_mach";
    for (std::size_t m = 0; m < rep.per_mode_rho.size(); ++m) out << ",rho_" << m + 1;
    out << '\n';
    out << format_double(o.scfg.p) << ',' << format_double(rep.accuracy_exact) << ','
        << format_double(rep.accuracy_mach) << ',' << format_double(rep.core_interaction.first)
        << ',' << format_double(rep.core_interaction.second);
    for (double rho : rep.per_mode_rho) out << ',' << format_double(rho);
    out << '\n';
    finish_out(out, o.output);

    std::ofstream tim = open_out(o.timing);
    tim << "exact_seconds,mach_seconds,speedup\n";
    tim << format_double(exact_seconds) << ',' << format_double(mach_seconds) << ','
        << format_double(exact_seconds / mach_seconds) << '\n';
    finish_out(tim, o.timing);

    std::cout << "exact_seconds = " << format_double(exact_seconds) << '\n'
              << "mach_seconds = " << format_double(mach_seconds) << '\n'
              << "speedup = " << format_double(exact_seconds / mach_seconds) << '\n'
              << "accuracy_exact = " << format_double(rep.accuracy_exact) << '\n'
              << "accuracy_mach = " << format_double(rep.accuracy_mach) << '\n'
              << "wrote " << o.output << '\n'
              << "wrote " << o.timing << '\n';
}

void add_bench(CLI::App& app) {
    auto o = std::make_shared<BenchOpts>();
    CLI::App* cmd = app.add_subcommand(
        "bench", "Time exact HOOI against the sampled pipeline and report accuracy side by side");
    cmd->add_option("--input", o->input, "Tensor file to decompose")->required();
    cmd->add_option("--ranks", o->ranks, "Per-mode target ranks, comma separated")
        ->required()
        ->delimiter(',');
    cmd->add_option("--p", o->scfg.p, "Keep probability in (0, 1]")->required();
    cmd->add_option("--seed", o->scfg.seed, "Sampling seed");
    cmd->add_option("--max-iters", o->hcfg.max_iterations, "Sweep budget");
    cmd->add_option("--fit-tol", o->hcfg.fit_tolerance,
                    "Stop once a sweep improves the fit by less than this");
    cmd->add_option("--output", o->output, "Result CSV (deterministic for a fixed seed)")->required();
    cmd->add_option("--timing", o->timing, "Wall-time CSV")->required();
    cmd->callback([o] { run_bench(*o); });
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    if (const int rc = apply_thread_env(); rc != 0) return rc;

    CLI::App app{"Tucker decomposition with randomized entrywise sparsification"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::simple);
    add_synth(app);
    add_ingest(app);
    add_sparsify(app);
    add_decompose(app, false, false);
    add_decompose(app, true, false);
    add_decompose(app, false, true);
    add_decompose(app, true, true);
    add_compare(app);
    add_bound(app);
    add_bench(app);

    try {
        std::vector<const char*> argv;
        argv.reserve(args.size() + 1);
        argv.push_back("mach");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ArgumentError& e) {
        return fail(2, e);
    } catch (const ShapeError& e) {
        return fail(3, e);
    } catch (const ParseError& e) {
        return fail(3, e);
    } catch (const IoError& e) {
        return fail(3, e);
    } catch (const ConvergenceError& e) {
        return fail(4, e);
    } catch (const std::exception& e) {
        return fail(1, e);
    }
    return 0;
}

}  // namespace mach
