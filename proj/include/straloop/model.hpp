// ============================================================================
// straloop/model.hpp — switched models and the model file format
// ============================================================================
//
// A switched model is a finite mode set with one constant rate vector per
// mode, over named state variables, plus an optional directed edge set.
// When no edges are declared the transition structure is the complete
// graph minus self-loops.
//
// Model files are line-oriented with sections
//
//   [vars] [mode <id>] [edges] [spec] [options]
//
// and, in automaton files emitted by the synthesizer, additionally
// [guard <q> -> <q'>] and [domain <q>]. Unknown sections or keys are
// rejected. Rationals are accepted as p/q or finite decimal literals.
//
// ============================================================================

#ifndef STRALOOP_MODEL_HPP
#define STRALOOP_MODEL_HPP

#include "straloop/serialize.hpp"
#include "straloop/strl.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace straloop {

struct Mode {
    VarId id;
    std::vector<Rat> rate;
    Formula init = Formula::t(); // optional per-mode initial-state confinement
};

class SwitchedModel {
public:
    SwitchedModel(std::vector<VarId> vars, std::vector<Mode> modes,
                  std::optional<std::vector<std::pair<size_t, size_t>>> edges = std::nullopt)
        : vars_(std::move(vars)), modes_(std::move(modes)), edges_(std::move(edges)) {
        if (modes_.empty()) throw std::invalid_argument("model: at least one mode required");
        if (vars_.empty()) throw std::invalid_argument("model: at least one state variable");
        std::set<VarId> seen;
        for (const auto& v : vars_) {
            if (v == kTimeVar) throw std::invalid_argument("model: 't' is reserved for time");
            if (!seen.insert(v).second)
                throw std::invalid_argument("model: duplicate variable " + v);
        }
        seen.clear();
        for (const auto& m : modes_) {
            if (!seen.insert(m.id).second)
                throw std::invalid_argument("model: duplicate mode " + m.id);
            if (m.rate.size() != vars_.size())
                throw std::invalid_argument("model: rate dimension mismatch in mode " + m.id);
        }
        if (edges_) {
            for (auto [a, b] : *edges_) {
                if (a >= modes_.size() || b >= modes_.size())
                    throw std::invalid_argument("model: edge endpoint out of range");
                if (a == b) throw std::invalid_argument("model: self-loop edge");
            }
        }
    }

    size_t dim() const { return vars_.size(); }
    const std::vector<VarId>& vars() const { return vars_; }
    const std::vector<Mode>& modes() const { return modes_; }
    size_t n_modes() const { return modes_.size(); }
    const Mode& mode(size_t i) const { return modes_[i]; }

    std::optional<size_t> mode_index(const VarId& id) const {
        for (size_t i = 0; i < modes_.size(); ++i)
            if (modes_[i].id == id) return i;
        return std::nullopt;
    }

    bool has_declared_edges() const { return edges_.has_value(); }

    // declared edges, or the complete graph minus self-loops
    std::vector<std::pair<size_t, size_t>> edges() const {
        if (edges_) return *edges_;
        std::vector<std::pair<size_t, size_t>> out;
        for (size_t a = 0; a < modes_.size(); ++a)
            for (size_t b = 0; b < modes_.size(); ++b)
                if (a != b) out.emplace_back(a, b);
        return out;
    }

    // successors of mode a in declaration order
    std::vector<size_t> successors(size_t a) const {
        std::vector<size_t> out;
        for (auto [x, y] : edges())
            if (x == a) out.push_back(y);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<VarId> vars_;
    std::vector<Mode> modes_;
    std::optional<std::vector<std::pair<size_t, size_t>>> edges_;
};

// Parsed model file: the model, the specification, and options.
struct ModelFile {
    SwitchedModel model;
    StraFormula spec;
    int k = 8;          // switching bound
    int retry = 3;      // conflict-resolution passes per edge
    Rat oracle_grid{1, 16};
    std::map<VarId, std::pair<Rat, Rat>> box; // per-variable sampling box

    // present only in automaton files
    std::map<std::pair<VarId, VarId>, Formula> guards;
    std::map<VarId, Formula> domains;
};

namespace detail {

inline std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

} // namespace detail

inline ModelFile parse_model_file(const std::string& text) {
    struct RawMode {
        VarId id;
        std::vector<Rat> rate;
        bool haveRate = false;
        Formula init = Formula::t();
    };
    std::vector<VarId> vars;
    std::vector<RawMode> modes;
    std::vector<std::pair<VarId, VarId>> edgeNames;
    bool haveEdgesSection = false;
    std::string specText;
    std::map<std::string, std::string> options;
    std::map<VarId, std::pair<Rat, Rat>> box;
    std::vector<std::pair<std::pair<VarId, VarId>, std::string>> guardTexts;
    std::vector<std::pair<VarId, std::string>> domainTexts;

    enum class Sec { None, Vars, Mode, Edges, Spec, Options, Guard, Domain };
    Sec sec = Sec::None;
    RawMode* curMode = nullptr;
    std::pair<VarId, VarId> curGuardEdge;
    VarId curDomainMode;

    std::istringstream in(text);
    std::string rawLine;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("model file: " + msg, lineno, 1);
    };
    while (std::getline(in, rawLine)) {
        ++lineno;
        std::string line = rawLine;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        line = detail::strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            std::string head = detail::strip(line.substr(1, line.size() - 2));
            auto words = detail::split_ws(head);
            if (words.empty()) fail("empty section header");
            const std::string& kind = words[0];
            if (kind == "vars" && words.size() == 1) sec = Sec::Vars;
            else if (kind == "mode" && words.size() == 2) {
                modes.push_back(RawMode{words[1], {}, false, Formula::t()});
                curMode = &modes.back();
                sec = Sec::Mode;
            } else if (kind == "edges" && words.size() == 1) {
                sec = Sec::Edges;
                haveEdgesSection = true;
            } else if (kind == "spec" && words.size() == 1) sec = Sec::Spec;
            else if (kind == "options" && words.size() == 1) sec = Sec::Options;
            else if (kind == "guard" && words.size() == 4 && words[2] == "->") {
                curGuardEdge = {words[1], words[3]};
                sec = Sec::Guard;
                guardTexts.push_back({curGuardEdge, ""});
            } else if (kind == "domain" && words.size() == 2) {
                curDomainMode = words[1];
                sec = Sec::Domain;
                domainTexts.push_back({curDomainMode, ""});
            } else {
                fail("unknown section '" + head + "'");
            }
            continue;
        }
        switch (sec) {
            case Sec::None:
                fail("content before any section");
                break;
            case Sec::Vars:
                for (const auto& w : detail::split_ws(line)) {
                    if (!w.empty() && w[0] == '$') fail("reserved variable name " + w);
                    vars.push_back(w);
                }
                break;
            case Sec::Mode: {
                auto words = detail::split_ws(line);
                if (words.empty()) break;
                if (words[0] == "rate") {
                    if (curMode->haveRate) fail("duplicate rate for mode " + curMode->id);
                    for (size_t i = 1; i < words.size(); ++i) {
                        auto r = Rat::try_parse(words[i]);
                        if (!r) fail("bad rate literal '" + words[i] + "'");
                        curMode->rate.push_back(*r);
                    }
                    curMode->haveRate = true;
                } else if (words[0] == "init") {
                    std::string rest = detail::strip(line.substr(4));
                    curMode->init = parse_formula(rest);
                } else {
                    fail("unknown mode key '" + words[0] + "'");
                }
                break;
            }
            case Sec::Edges: {
                auto words = detail::split_ws(line);
                if (words.size() != 3 || words[1] != "->") fail("edge syntax is 'a -> b'");
                edgeNames.emplace_back(words[0], words[2]);
                break;
            }
            case Sec::Spec:
                if (!specText.empty()) specText += " ";
                specText += line;
                break;
            case Sec::Options: {
                auto words = detail::split_ws(line);
                if (words.empty()) break;
                if (words[0] == "box") {
                    if (words.size() != 4) fail("box syntax is 'box var lo hi'");
                    auto lo = Rat::try_parse(words[2]), hi = Rat::try_parse(words[3]);
                    if (!lo || !hi) fail("bad box bounds");
                    box[words[1]] = {*lo, *hi};
                } else if (words.size() == 2 &&
                           (words[0] == "k" || words[0] == "retry" || words[0] == "grid")) {
                    options[words[0]] = words[1];
                } else {
                    fail("unknown option '" + words[0] + "'");
                }
                break;
            }
            case Sec::Guard:
                guardTexts.back().second += guardTexts.back().second.empty() ? line : " " + line;
                break;
            case Sec::Domain:
                domainTexts.back().second += domainTexts.back().second.empty() ? line : " " + line;
                break;
        }
    }

    if (modes.empty()) throw ParseError("model file: no modes declared", lineno, 1);
    if (specText.empty()) throw ParseError("model file: missing [spec] section", lineno, 1);

    std::vector<Mode> ms;
    for (auto& rm : modes) {
        if (!rm.haveRate)
            throw ParseError("model file: mode " + rm.id + " has no rate", lineno, 1);
        ms.push_back(Mode{rm.id, std::move(rm.rate), std::move(rm.init)});
    }
    std::optional<std::vector<std::pair<size_t, size_t>>> edges;
    if (haveEdgesSection) {
        std::vector<std::pair<size_t, size_t>> es;
        SwitchedModel probe(vars, ms); // for index lookup
        for (const auto& [a, b] : edgeNames) {
            auto ia = probe.mode_index(a), ib = probe.mode_index(b);
            if (!ia || !ib)
                throw ParseError("model file: edge references unknown mode", lineno, 1);
            es.emplace_back(*ia, *ib);
        }
        edges = std::move(es);
    }
    SwitchedModel model(std::move(vars), std::move(ms), std::move(edges));

    // spec must mention only state variables and t
    StraFormula spec = parse_stra(specText);
    std::set<VarId> allowed(model.vars().begin(), model.vars().end());
    allowed.insert(kTimeVar);
    for (const auto& f : {spec.phi1, spec.phi2}) {
        for (const auto& v : f.vars())
            if (!allowed.count(v))
                throw ParseError("model file: spec mentions unknown variable " + v, 1, 1);
    }

    ModelFile mf{std::move(model), std::move(spec), 8, 3, Rat(1, 16), {}, {}, {}};
    if (auto it = options.find("k"); it != options.end()) mf.k = std::stoi(it->second);
    if (auto it = options.find("retry"); it != options.end()) mf.retry = std::stoi(it->second);
    if (auto it = options.find("grid"); it != options.end()) mf.oracle_grid = Rat::parse(it->second);
    if (mf.k < 0) throw ParseError("model file: k must be nonnegative", 1, 1);
    if (mf.oracle_grid.sign() <= 0)
        throw ParseError("model file: grid must be positive", 1, 1);
    mf.box = std::move(box);

    for (auto& [edge, textG] : guardTexts) {
        auto ia = mf.model.mode_index(edge.first), ib = mf.model.mode_index(edge.second);
        if (!ia || !ib) throw ParseError("model file: guard for unknown edge", 1, 1);
        mf.guards[edge] = parse_formula(textG);
    }
    for (auto& [m, textD] : domainTexts) {
        if (!mf.model.mode_index(m)) throw ParseError("model file: domain for unknown mode", 1, 1);
        mf.domains[m] = parse_formula(textD);
    }
    return mf;
}

inline ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_file(ss.str());
}

// Serializes a model file; guards/domains emitted when present (the
// automaton output format).
inline std::string serialize_model_file(const ModelFile& mf) {
    std::ostringstream os;
    os << "[vars]\n";
    for (const auto& v : mf.model.vars()) os << v << "\n";
    for (const auto& m : mf.model.modes()) {
        os << "\n[mode " << m.id << "]\n";
        os << "rate";
        for (const auto& r : m.rate) os << " " << r.str();
        os << "\n";
        if (!m.init.is_true()) os << "init " << pretty_string(m.init) << "\n";
    }
    if (mf.model.has_declared_edges()) {
        os << "\n[edges]\n";
        for (auto [a, b] : mf.model.edges())
            os << mf.model.mode(a).id << " -> " << mf.model.mode(b).id << "\n";
    }
    os << "\n[spec]\n";
    os << pretty_string(mf.spec.phi1) << " U[" << mf.spec.lo.str() << ","
       << mf.spec.hi.str() << "] " << pretty_string(mf.spec.phi2) << "\n";
    os << "\n[options]\n";
    os << "k " << mf.k << "\n";
    os << "retry " << mf.retry << "\n";
    os << "grid " << mf.oracle_grid.str() << "\n";
    for (const auto& [v, b] : mf.box)
        os << "box " << v << " " << b.first.str() << " " << b.second.str() << "\n";
    for (const auto& [e, g] : mf.guards) {
        os << "\n[guard " << e.first << " -> " << e.second << "]\n";
        os << pretty_string(g) << "\n";
    }
    for (const auto& [m, d] : mf.domains) {
        os << "\n[domain " << m << "]\n";
        os << pretty_string(d) << "\n";
    }
    return os.str();
}

} // namespace straloop

#endif // STRALOOP_MODEL_HPP
