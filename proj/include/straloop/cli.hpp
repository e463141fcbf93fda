// ============================================================================
// straloop/cli.hpp — command implementations behind the straloop tool
// ============================================================================
//
//   straloop synth      <model> [--k N] [--grid p/q] [--out DIR]
//   straloop controller <model> --x0 v,... [--k N] [--simulate] [--out DIR]
//   straloop automaton  <model> [--k N] [--samples N] [--out DIR]
//   straloop check      <model> --x0 v,... [--schedule "(q,t)(q,t)"] [--k N]
//
// Exit codes: 0 success, 1 usage/parse/internal error, 2 initial state not
// synthesizable (controller/check), 3 automaton synthesis incomplete or
// edges missing. STRALOOP_THREADS caps the per-iteration mode parallelism.
//
// All emitted artifacts re-parse to semantically equal objects, and the
// semantic outputs are byte-deterministic for fixed inputs and options.
//
// ============================================================================

#ifndef STRALOOP_CLI_HPP
#define STRALOOP_CLI_HPP

#include "straloop/model.hpp"
#include "straloop/simcheck.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace straloop::cli {

namespace detail {

inline std::pair<int, int> formula_size(const Formula& f) {
    auto dnf = to_dnf(f);
    int atoms = 0;
    for (const auto& c : dnf) atoms += static_cast<int>(c.size());
    return {static_cast<int>(dnf.size()), atoms};
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

inline std::vector<Rat> parse_x0(const std::string& csv, size_t dim) {
    std::vector<Rat> x;
    std::string cur;
    std::istringstream is(csv);
    while (std::getline(is, cur, ',')) x.push_back(Rat::parse(cur));
    if (x.size() != dim)
        throw std::invalid_argument("--x0 expects " + std::to_string(dim) +
                                    " comma-separated rationals");
    return x;
}

// "(q2,0)(q1,1)" — the same shape cmd_controller prints
inline Schedule parse_schedule(const std::string& text, const SwitchedModel& model) {
    std::vector<Schedule::Step> steps;
    size_t i = 0;
    auto skip_ws = [&] { while (i < text.size() && isspace(text[i])) ++i; };
    skip_ws();
    while (i < text.size()) {
        if (text[i] != '(') throw std::invalid_argument("schedule: expected '('");
        size_t comma = text.find(',', i);
        size_t close = text.find(')', i);
        if (comma == std::string::npos || close == std::string::npos || comma > close)
            throw std::invalid_argument("schedule: malformed step");
        std::string mode = text.substr(i + 1, comma - i - 1);
        std::string time = text.substr(comma + 1, close - comma - 1);
        auto q = model.mode_index(mode);
        if (!q) throw std::invalid_argument("schedule: unknown mode " + mode);
        steps.push_back({*q, Rat::parse(time)});
        i = close + 1;
        skip_ws();
    }
    return Schedule(std::move(steps));
}

inline std::string sets_txt(const SwitchedModel& model, const StateTimeFamily& family) {
    std::ostringstream os;
    for (int i = 0; i <= family.top_index(); ++i)
        for (size_t q = 0; q < model.n_modes(); ++q)
            os << "X[" << model.mode(q).id << "][" << i
               << "] = " << canonical_string(family.at(q, i)) << "\n";
    return os.str();
}

inline std::string init_txt(const SwitchedModel& model, const InitPartition& partition) {
    std::ostringstream os;
    for (int i = 0; i <= partition.top_index(); ++i)
        for (size_t q = 0; q < model.n_modes(); ++q)
            os << "Init[" << model.mode(q).id << "][" << i
               << "] = " << canonical_string(partition.at(q, i)) << "\n";
    return os.str();
}

inline std::vector<Rat> axis_grid(const Rat& lo, const Rat& hi, int n) {
    std::vector<Rat> out;
    if (n <= 1) {
        out.push_back(lo);
        return out;
    }
    for (int j = 0; j < n; ++j)
        out.push_back(lo + (hi - lo) * Rat(j) / Rat(n - 1));
    return out;
}

// membership CSV over the declared box (time axis over [0, u])
inline std::string sample_csv(const Formula& f, const ModelFile& mf, bool withTime, int n) {
    const auto& model = mf.model;
    std::vector<std::vector<Rat>> axes;
    for (const auto& v : model.vars()) {
        auto it = mf.box.find(v);
        if (it == mf.box.end())
            throw std::runtime_error("--samples requires a box for variable " + v);
        axes.push_back(axis_grid(it->second.first, it->second.second, n));
    }
    if (withTime) axes.push_back(axis_grid(Rat(0), mf.spec.hi, n));
    std::ostringstream os;
    for (const auto& v : model.vars()) os << v << ",";
    if (withTime) os << "t,";
    os << "member\n";
    std::vector<VarId> axisNames(model.vars());
    if (withTime) axisNames.push_back(kTimeVar);
    std::vector<size_t> idx(axes.size(), 0);
    for (;;) {
        std::map<VarId, Rat> pt;
        for (size_t a = 0; a < axes.size(); ++a) pt[axisNames[a]] = axes[a][idx[a]];
        for (size_t a = 0; a < axes.size(); ++a) os << pt[axisNames[a]].str() << ",";
        os << (f.eval(pt) ? 1 : 0) << "\n";
        size_t a = 0;
        for (; a < axes.size(); ++a) {
            if (++idx[a] < axes[a].size()) break;
            idx[a] = 0;
        }
        if (a == axes.size()) break;
    }
    return os.str();
}

struct LoadedModel {
    ModelFile mf;
    std::string path;
};

} // namespace detail

inline int cmd_synth(const ModelFile& mf, int k, const std::filesystem::path& outDir,
                     std::ostream& out) {
    namespace fs = std::filesystem;
    auto t0 = std::chrono::steady_clock::now();
    SynthesisResult r = run_fixpoint(mf.model, mf.spec, k);
    auto t1 = std::chrono::steady_clock::now();
    double synthMs = std::chrono::duration<double, std::milli>(t1 - t0).count();

    fs::create_directories(outDir);
    detail::write_file(outDir / "sets.txt", detail::sets_txt(mf.model, r.family));
    detail::write_file(outDir / "init.txt", detail::init_txt(mf.model, r.partition));

    nlohmann::json report;
    report["k"] = k;
    report["grid"] = mf.oracle_grid.str();
    if (r.family.fixpoint_at) report["fixpoint_at"] = *r.family.fixpoint_at;
    else report["fixpoint_at"] = nullptr;
    report["iterations"] = r.family.top_index();
    nlohmann::json sizes = nlohmann::json::array();
    for (int i = 0; i <= r.family.top_index(); ++i) {
        for (size_t q = 0; q < mf.model.n_modes(); ++q) {
            auto [conj, atoms] = detail::formula_size(r.family.at(q, i));
            sizes.push_back({{"mode", mf.model.mode(q).id},
                             {"level", i},
                             {"conjuncts", conj},
                             {"atoms", atoms}});
        }
    }
    report["set_sizes"] = sizes;
    report["timings_ms"] = {{"synthesis", synthMs}};
    detail::write_file(outDir / "report.json", report.dump(2) + "\n");

    out << "synth: wrote " << (outDir / "sets.txt").string() << ", init.txt, report.json";
    if (r.family.fixpoint_at) out << " (fixpoint at " << *r.family.fixpoint_at << ")";
    else out << " (no fixpoint within k=" << k << ")";
    out << "\n";
    return 0;
}

inline int cmd_controller(const ModelFile& mf, int k, const std::vector<Rat>& x0,
                          bool doSimulate, std::ostream& out, std::ostream& err) {
    SynthesisResult r = run_fixpoint(mf.model, mf.spec, k);
    Schedule sched = [&] {
        try {
            return extract_controller(x0, r.family, r.partition, mf.model);
        } catch (const SynthesisError& e) {
            err << "controller: " << e.what() << "\n";
            throw;
        }
    }();
    out << sched.str(mf.model) << "\n";
    if (doSimulate) {
        Rat horizon = max(mf.spec.hi, sched.steps.back().time) + Rat(1);
        ExecutionTrace tr = simulate(mf.model, x0, sched, horizon);
        out << trace_csv(tr, mf.model);
        bool ok = monitor(tr.trajectory, mf.spec, Rat(0));
        out << "verdict: " << (ok ? "satisfied" : "violated") << "\n";
    }
    return 0;
}

inline int cmd_automaton(const ModelFile& mf, int k, int samples,
                         const std::filesystem::path& outDir, std::ostream& out,
                         std::ostream& err) {
    namespace fs = std::filesystem;
    if (!mf.model.has_declared_edges()) {
        err << "automaton: edges required (declare an [edges] section)\n";
        return 3;
    }
    SynthesisResult r = run_fixpoint(mf.model, mf.spec, k);
    AutomatonOut aut = resolve_and_assemble(mf.model, r.family, r.partition, mf.spec,
                                            mf.retry);
    fs::create_directories(outDir);

    // extended model file: synthesized init per mode + guard/domain blocks
    ModelFile outMf = mf;
    std::vector<Mode> newModes;
    for (size_t q = 0; q < mf.model.n_modes(); ++q) {
        Mode m = mf.model.mode(q);
        m.init = aut.init[q];
        newModes.push_back(std::move(m));
    }
    std::optional<std::vector<std::pair<size_t, size_t>>> edges = mf.model.edges();
    outMf.model = SwitchedModel(mf.model.vars(), std::move(newModes), std::move(edges));
    outMf.guards.clear();
    outMf.domains.clear();
    for (const auto& [edge, g] : aut.guards.guards)
        outMf.guards[{mf.model.mode(edge.first).id, mf.model.mode(edge.second).id}] = g;
    for (size_t q = 0; q < mf.model.n_modes(); ++q)
        outMf.domains[mf.model.mode(q).id] = aut.domains[q];

    std::string text = serialize_model_file(outMf);
    if (aut.incomplete) {
        std::string head = "# INCOMPLETE: unresolved edges:";
        for (const auto& e : aut.unresolved)
            head += " " + mf.model.mode(e.first).id + "->" + mf.model.mode(e.second).id;
        text = head + "\n" + text;
    }
    detail::write_file(outDir / "automaton.model", text);

    if (samples > 0) {
        for (int i = 0; i <= r.family.top_index(); ++i)
            for (size_t q = 0; q < mf.model.n_modes(); ++q)
                detail::write_file(outDir / ("sample_X_" + mf.model.mode(q).id + "_" +
                                             std::to_string(i) + ".csv"),
                                   detail::sample_csv(r.family.at(q, i), mf, true, samples));
        for (const auto& [edge, g] : aut.guards.guards)
            detail::write_file(outDir / ("sample_guard_" + mf.model.mode(edge.first).id +
                                         "_" + mf.model.mode(edge.second).id + ".csv"),
                               detail::sample_csv(g, mf, false, samples));
    }

    out << "automaton: wrote " << (outDir / "automaton.model").string() << "\n";
    if (aut.incomplete) {
        err << "automaton: conflict resolution incomplete\n";
        return 3;
    }
    return 0;
}

inline int cmd_check(const ModelFile& mf, int k, const std::vector<Rat>& x0,
                     const std::string& scheduleText, std::ostream& out, std::ostream& err) {
    Schedule sched = [&] {
        if (!scheduleText.empty()) return detail::parse_schedule(scheduleText, mf.model);
        SynthesisResult r = run_fixpoint(mf.model, mf.spec, k);
        return extract_controller(x0, r.family, r.partition, mf.model);
    }();
    Rat horizon = max(mf.spec.hi, sched.steps.back().time) + Rat(1);
    ExecutionTrace tr = simulate(mf.model, x0, sched, horizon);
    bool ok = monitor(tr.trajectory, mf.spec, Rat(0));
    out << sched.str(mf.model) << "\n";
    out << "verdict: " << (ok ? "satisfied" : "violated") << "\n";
    if (!ok) {
        err << "check: schedule does not satisfy the specification\n";
        return 2;
    }
    return 0;
}

// Argument surface; returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact switching-controller synthesis for constant-rate switched systems"};
    app.require_subcommand(1);

    std::string modelPath, x0Text, scheduleText, outDirText = ".";
    int kOverride = -1, samples = 0;
    std::string gridText;
    bool doSimulate = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("model", modelPath, "model file")->required();
        cmd->add_option("--k", kOverride, "switching bound (overrides the model option)");
        cmd->add_option("--grid", gridText, "oracle grid step (overrides the model option)");
    };
    CLI::App* synth = app.add_subcommand("synth", "compute state-time sets and init partition");
    add_common(synth);
    synth->add_option("--out", outDirText, "output directory");

    CLI::App* controller = app.add_subcommand("controller", "extract a schedule for an x0");
    add_common(controller);
    controller->add_option("--x0", x0Text, "initial state (comma-separated rationals)")
        ->required();
    controller->add_flag("--simulate", doSimulate, "append trace CSV and monitor verdict");
    controller->add_option("--out", outDirText, "output directory");

    CLI::App* automaton = app.add_subcommand("automaton", "synthesize guards and domains");
    add_common(automaton);
    automaton->add_option("--samples", samples, "write per-set membership CSVs (points per axis)");
    automaton->add_option("--out", outDirText, "output directory");

    CLI::App* check = app.add_subcommand("check", "simulate a schedule and report the verdict");
    add_common(check);
    check->add_option("--x0", x0Text, "initial state (comma-separated rationals)")->required();
    check->add_option("--schedule", scheduleText,
                      "schedule text; when absent a controller is extracted first");

    std::vector<const char*> argv;
    std::string prog = "straloop";
    argv.push_back(prog.c_str());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        ModelFile mf = load_model_file(modelPath);
        if (kOverride >= 0) mf.k = kOverride;
        if (!gridText.empty()) mf.oracle_grid = Rat::parse(gridText);
        std::filesystem::path outDir(outDirText);
        if (synth->parsed()) return cmd_synth(mf, mf.k, outDir, out);
        if (controller->parsed())
            return cmd_controller(mf, mf.k, detail::parse_x0(x0Text, mf.model.dim()),
                                  doSimulate, out, err);
        if (automaton->parsed()) return cmd_automaton(mf, mf.k, samples, outDir, out, err);
        if (check->parsed())
            return cmd_check(mf, mf.k, detail::parse_x0(x0Text, mf.model.dim()), scheduleText,
                             out, err);
        err << "no subcommand\n";
        return 1;
    } catch (const SynthesisError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace straloop::cli

#endif // STRALOOP_CLI_HPP
