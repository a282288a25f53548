#include "dea_cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dea/dataset.hpp"
#include "dea/error.hpp"
#include "dea/frontier.hpp"
#include "dea/metrics.hpp"
#include "dea/models.hpp"
#include "dea/report.hpp"
#include "dea/sweep.hpp"

namespace dea::cli {

namespace {

struct Options {
    std::string data;
    std::string rts = "vrs";
    std::string format = "md";
    std::string out;
    std::string runs_dir = "dea-runs";
    std::string model;
    std::vector<std::string> dmus;
    double alpha = 1.0;
    double from = 1.0;
    double to = 0.1;
    double step = 0.1;
    bool all = false;
    std::string kind;
    unsigned jobs = 0;
    bool no_refine = false;
};

std::mutex g_runs_mutex;

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

Rts parse_rts(const std::string& s) {
    if (s == "vrs") {
        return Rts::Variable;
    }
    if (s == "crs") {
        return Rts::Constant;
    }
    throw UsageError("--rts must be vrs or crs, got '" + s + "'");
}

ModelKind parse_model(const std::string& s) {
    if (s.empty()) {
        throw UsageError("--model is required");
    }
    auto k = parse_model_kind(s);
    if (!k) {
        throw UsageError("unknown --model '" + s + "' (closest, bi-vrs, oriented-out, oriented-in, bi-crs)");
    }
    return *k;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot write '" + path + "'");
    }
    f << text;
}

class Session {
public:
    Session(const Options& o, std::string command, std::ostream& out) : opts_(o), command_(std::move(command)), out_(out) {
        if (opts_.data.empty()) {
            throw UsageError("--data is required");
        }
        if (opts_.format != "md" && opts_.format != "csv" && opts_.format != "json") {
            throw UsageError("--format must be md, csv or json");
        }
        digest_ = file_digest(opts_.data);
        data_ = load_csv(opts_.data, std::nullopt, parse_rts(opts_.rts));
        if (auto problems = validate(data_); !problems.empty()) {
            throw DataError("invalid dataset: " + join(problems, "; "));
        }
    }

    const Dataset& data() const { return data_; }
    const Options& opts() const { return opts_; }

    const FrontierClassification& frontier() {
        if (!frontier_) {
            frontier_ = classify(data_);
        }
        return *frontier_;
    }

    Json envelope(Json results) const {
        Json j = Json::object();
        j["dataset_digest"] = digest_;
        j["command"] = command_json();
        j["results"] = std::move(results);
        return j;
    }

    /// Prints `text`, or writes it to --out when given.
    void emit(const std::string& text) {
        if (opts_.out.empty()) {
            out_ << text;
        } else {
            write_file(opts_.out, text);
        }
    }

    void record(const Json& results) const {
        Json rec = Json::object();
        rec["timestamp"] = utc_timestamp();
        rec["dataset_digest"] = digest_;
        rec["command"] = command_json();
        rec["results"] = results;
        std::lock_guard<std::mutex> lock(g_runs_mutex);
        std::filesystem::create_directories(opts_.runs_dir);
        std::ofstream f(std::filesystem::path(opts_.runs_dir) / (digest_ + ".jsonl"), std::ios::app);
        if (!f) {
            throw UsageError("cannot append run record under '" + opts_.runs_dir + "'");
        }
        f << rec.dump() << "\n";
    }

private:
    Json command_json() const {
        Json c = Json::object();
        c["name"] = command_;
        c["data"] = opts_.data;
        c["rts"] = opts_.rts;
        if (!opts_.model.empty()) {
            c["model"] = opts_.model;
        }
        if (!opts_.dmus.empty()) {
            c["dmu"] = opts_.dmus;
        }
        if (command_ == "bench") {
            c["alpha"] = opts_.alpha;
        }
        if (command_ == "sweep") {
            c["from"] = opts_.from;
            c["to"] = opts_.to;
            c["step"] = opts_.step;
            c["all"] = opts_.all;
        }
        if (!opts_.kind.empty()) {
            c["kind"] = opts_.kind;
        }
        c["format"] = opts_.format;
        return c;
    }

    Options opts_;
    std::string command_;
    std::ostream& out_;
    std::string digest_;
    Dataset data_;
    std::optional<FrontierClassification> frontier_;
};

int cmd_classify(Session& s) {
    const auto& c = s.frontier();
    const Json results = classification_json(c);
    if (s.opts().format == "json") {
        s.emit(s.envelope(results).dump(2) + "\n");
    } else if (s.opts().format == "csv") {
        s.emit(render_classification_csv(c));
    } else {
        s.emit(render_classification_md(s.data(), c));
    }
    s.record(results);
    return 0;
}

int cmd_distances(Session& s) {
    const auto& c = s.frontier();
    DistanceKind kind = DistanceKind::L1;
    if (s.opts().kind == "mix") {
        kind = DistanceKind::Mix;
    } else if (s.opts().kind.empty()) {
        kind = s.data().rts == Rts::Constant ? DistanceKind::Mix : DistanceKind::L1;
    } else if (s.opts().kind != "l1") {
        throw UsageError("--kind must be l1 or mix");
    }
    std::vector<std::string> rows = s.opts().dmus;
    if (rows.empty()) {
        for (std::size_t j = 0; j < c.ids.size(); ++j) {
            if (!c.is_efficient(j)) {
                rows.push_back(c.ids[j]);
            }
        }
    }
    for (const auto& id : rows) {
        if (!s.data().index_of(id)) {
            throw UsageError("unknown DMU id '" + id + "'");
        }
    }
    const auto m = distance_matrix(s.data(), c.extreme, kind, rows);
    const Json results = distances_json(m);
    if (s.opts().format == "json") {
        s.emit(s.envelope(results).dump(2) + "\n");
    } else if (s.opts().format == "csv") {
        s.emit(render_distances_csv(m));
    } else {
        s.emit(render_distances_md(m));
    }
    s.record(results);
    return 0;
}

SolveOptions solve_options(const Options& o) {
    SolveOptions so;
    so.endpoint_refine = !o.no_refine;
    return so;
}

int cmd_bench(Session& s) {
    const ModelKind kind = parse_model(s.opts().model);
    if (s.opts().dmus.size() != 1) {
        throw UsageError("bench needs exactly one --dmu");
    }
    if (!(s.opts().alpha >= 0.0 && s.opts().alpha <= 1.0)) {
        throw UsageError("--alpha must lie in [0, 1]");
    }
    detail::check_compatible(s.data(), kind);
    const auto& c = s.frontier();
    SolveOptions so = solve_options(s.opts());
    so.alpha = s.opts().alpha;
    const auto sol = solve_model(s.data(), c.extreme, s.opts().dmus.front(), kind, so);
    const Json results = Json::array({sol});
    if (s.opts().format == "json") {
        s.emit(s.envelope(results).dump(2) + "\n");
    } else if (s.opts().format == "csv") {
        s.emit(render_solutions_csv({sol}, s.data()));
    } else {
        s.emit(render_bench_md(sol, s.data()));
    }
    s.record(results);
    return 0;
}

int cmd_sweep(Session& s, std::ostream& out) {
    const ModelKind kind = parse_model(s.opts().model);
    detail::check_compatible(s.data(), kind);
    const auto grid = make_grid(s.opts().from, s.opts().to, s.opts().step);
    std::vector<std::string> ids = s.opts().dmus;
    if (s.opts().all) {
        if (!ids.empty()) {
            throw UsageError("--all and --dmu are mutually exclusive");
        }
        for (const auto& r : s.data().dmus) {
            ids.push_back(r.id);
        }
    }
    if (ids.empty()) {
        throw UsageError("sweep needs --dmu or --all");
    }
    for (const auto& id : ids) {
        if (!s.data().index_of(id)) {
            throw UsageError("unknown DMU id '" + id + "'");
        }
    }
    const auto& c = s.frontier();
    const SolveOptions so = solve_options(s.opts());

    std::vector<AlphaSeries> series(ids.size());
    unsigned jobs = s.opts().jobs ? s.opts().jobs : std::max(1u, std::thread::hardware_concurrency());
    if (jobs <= 1 || ids.size() <= 1) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
            series[k] = alpha_series(s.data(), c.extreme, ids[k], kind, grid, so);
        }
    } else {
        std::vector<std::future<void>> running;
        std::size_t next = 0;
        while (next < ids.size() || !running.empty()) {
            while (next < ids.size() && running.size() < jobs) {
                const std::size_t k = next++;
                running.push_back(std::async(std::launch::async, [&, k] {
                    series[k] = alpha_series(s.data(), c.extreme, ids[k], kind, grid, so);
                }));
            }
            running.front().get();
            running.erase(running.begin());
        }
    }

    Json results = Json::array();
    std::vector<BenchmarkSolution> flat;
    for (const auto& a : series) {
        results.push_back(series_json(a));
        flat.insert(flat.end(), a.solutions.begin(), a.solutions.end());
    }
    if (!s.opts().out.empty()) {
        Json doc = s.envelope(Json(flat));
        write_file(s.opts().out, doc.dump(2) + "\n");
    }
    if (s.opts().format == "json") {
        out << s.envelope(Json(flat)).dump(2) << "\n";
    } else if (s.opts().format == "csv") {
        out << render_solutions_csv(flat, s.data());
    } else {
        for (std::size_t k = 0; k < series.size(); ++k) {
            if (k) {
                out << "\n";
            }
            out << render_series_md(series[k], s.data());
        }
    }
    s.record(results);
    return 0;
}

int cmd_describe(Session& s) {
    const auto st = describe(s.data());
    Json results = Json::array();
    for (const auto& v : st.variables) {
        results.push_back({{"name", v.name},
                           {"role", v.is_input ? "input" : "output"},
                           {"mean", v.mean},
                           {"sd", v.sd},
                           {"min", v.min},
                           {"max", v.max}});
    }
    if (s.opts().format == "json") {
        s.emit(s.envelope(results).dump(2) + "\n");
    } else {
        std::ostringstream o;
        const bool md = s.opts().format == "md";
        if (md) {
            o << "| variable | role | mean | sd | min | max |\n| --- | --- | --- | --- | --- | --- |\n";
        } else {
            o << "variable,role,mean,sd,min,max\n";
        }
        for (const auto& v : st.variables) {
            const std::vector<std::string> cells{v.name, v.is_input ? "input" : "output", fixed(v.mean, 3),
                                                 fixed(v.sd, 3), fixed(v.min, 3), fixed(v.max, 3)};
            o << (md ? "| " + join(cells, " | ") + " |\n" : join(cells, ",") + "\n");
        }
        o << (md ? "\nn = " + std::to_string(s.data().n()) + "\n" : "");
        s.emit(o.str());
    }
    s.record(results);
    return 0;
}

int cmd_export(Session& s) {
    s.emit(export_csv(s.data()));
    s.record(Json::object({{"rows", s.data().n()}}));
    return 0;
}

}  // namespace

std::string file_digest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw DataError("cannot open '" + path + "'");
    }
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int k = 0; k < len; ++k) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
    }
    return hex.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Benchmarking with closest targets and most similar peers (DEA)", "dea-bench"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--data", o.data, "CSV file (id column, then in:/out: columns)");
        sub->add_option("--rts", o.rts, "returns to scale: vrs or crs")->capture_default_str();
        sub->add_option("--format", o.format, "md, csv or json")->capture_default_str();
        sub->add_option("--out", o.out, "write output to this file");
        sub->add_option("--runs-dir", o.runs_dir, "directory for run records")->capture_default_str();
    };
    auto* classify_cmd = app.add_subcommand("classify", "efficiency status and extreme efficient set");
    common(classify_cmd);
    auto* distances_cmd = app.add_subcommand("distances", "distance matrix from DMUs to the extreme efficient set");
    common(distances_cmd);
    distances_cmd->add_option("--kind", o.kind, "l1 or mix (default: l1 under vrs, mix under crs)");
    distances_cmd->add_option("--dmu", o.dmus, "row DMUs (default: inefficient DMUs)");
    auto* bench_cmd = app.add_subcommand("bench", "benchmark one DMU at one alpha");
    common(bench_cmd);
    bench_cmd->add_option("--model", o.model, "closest, bi-vrs, oriented-out, oriented-in or bi-crs");
    bench_cmd->add_option("--dmu", o.dmus, "evaluated DMU");
    bench_cmd->add_option("--alpha", o.alpha, "weight on target closeness, in [0, 1]")->capture_default_str();
    bench_cmd->add_flag("--no-refine", o.no_refine, "skip the second stage at interior alpha");
    auto* sweep_cmd = app.add_subcommand("sweep", "alpha-grid series of reference sets and targets");
    common(sweep_cmd);
    sweep_cmd->add_option("--model", o.model, "closest, bi-vrs, oriented-out, oriented-in or bi-crs");
    sweep_cmd->add_option("--dmu", o.dmus, "evaluated DMU(s)");
    sweep_cmd->add_flag("--all", o.all, "every DMU in the dataset");
    sweep_cmd->add_option("--from", o.from, "first alpha")->capture_default_str();
    sweep_cmd->add_option("--to", o.to, "last alpha")->capture_default_str();
    sweep_cmd->add_option("--step", o.step, "grid step")->capture_default_str();
    sweep_cmd->add_option("--jobs", o.jobs, "worker threads for --all (0: all cores)")->capture_default_str();
    sweep_cmd->add_flag("--no-refine", o.no_refine, "skip the second stage at interior alpha");
    auto* describe_cmd = app.add_subcommand("describe", "summary statistics per variable");
    common(describe_cmd);
    auto* export_cmd = app.add_subcommand("export", "re-emit the dataset as canonical CSV");
    common(export_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*classify_cmd) {
            Session s(o, "classify", out);
            return cmd_classify(s);
        }
        if (*distances_cmd) {
            Session s(o, "distances", out);
            return cmd_distances(s);
        }
        if (*bench_cmd) {
            Session s(o, "bench", out);
            return cmd_bench(s);
        }
        if (*sweep_cmd) {
            Session s(o, "sweep", out);
            return cmd_sweep(s, out);
        }
        if (*describe_cmd) {
            Session s(o, "describe", out);
            return cmd_describe(s);
        }
        if (*export_cmd) {
            Session s(o, "export", out);
            return cmd_export(s);
        }
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const NodeLimitError& e) {
        err << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace dea::cli
