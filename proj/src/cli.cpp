#include "fabd/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fabd/diverse.hpp"
#include "fabd/engines.hpp"
#include "fabd/error.hpp"
#include "fabd/generate.hpp"
#include "fabd/lattice.hpp"
#include "fabd/oracle.hpp"
#include "fabd/parser.hpp"
#include "fabd/polyfacet.hpp"
#include "fabd/reduce.hpp"

namespace fabd {

namespace {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Usage, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Options {
    std::string engine = "auto"; // auto | poly | oracle
    bool json = false;
    std::uint64_t budget = EngineConfig{}.model_budget;

    EngineConfig engine_config() const { return EngineConfig{budget}; }
};

struct QueryOutput {
    std::string command;
    Json answer;
    std::string engine = "ORACLE";
    std::vector<ComplexityVerdict> verdicts;
    std::optional<Json> witness; // {e1, e2, distance} with variable names
    std::string text;            // non-json payload for reduce / gen
};

Json verdict_json(const ComplexityVerdict& v) {
    Json j;
    j["problem"] = problem_name(v.problem);
    j["verdict"] = verdict_name(v.verdict);
    j["justification"] = v.justification;
    return j;
}

void emit(const QueryOutput& q, const Options& opt, double ms, std::ostream& out) {
    if (opt.json) {
        Json j;
        j["command"] = q.command;
        j["answer"] = q.answer;
        j["engine"] = q.engine;
        Json vs = Json::array();
        for (const auto& v : q.verdicts) vs.push_back(verdict_json(v));
        j["verdicts"] = vs;
        j["timing_ms"] = ms;
        if (q.witness) j["witness"] = *q.witness;
        out << j.dump() << '\n';
        return;
    }
    if (!q.text.empty()) {
        out << q.text;
        return;
    }
    out << "answer: " << q.answer.dump() << '\n';
    out << "engine: " << q.engine << '\n';
    for (const auto& v : q.verdicts)
        out << "verdict: " << problem_name(v.problem) << " = " << verdict_name(v.verdict) << '\n';
    if (q.witness) out << "witness: " << q.witness->dump() << '\n';
}

Json name_list(const AbductionInstance& inst, const std::vector<Var>& vs) {
    Json a = Json::array();
    for (Var v : vs) a.push_back(inst.vars.name(v));
    return a;
}

Json set_list(const AbductionInstance& inst, const std::vector<std::vector<Var>>& sets) {
    Json a = Json::array();
    for (const auto& s : sets) a.push_back(name_list(inst, s));
    return a;
}

Json witness_json(const AbductionInstance& inst, const DiversityWitness& w) {
    Json j;
    j["e1"] = name_list(inst, w.e1);
    j["e2"] = name_list(inst, w.e2);
    j["distance"] = w.d;
    return j;
}

Var resolve_query(const ParsedInstance& parsed, const std::string& var_flag) {
    if (!var_flag.empty()) {
        auto v = parsed.base.vars.find(var_flag);
        if (!v || !parsed.base.is_hyp(*v))
            fail(ErrorCode::ScopeError, "query variable '" + var_flag + "' not in H");
        return *v;
    }
    if (parsed.query) return *parsed.query;
    fail(ErrorCode::Usage, "no query variable: pass --var or add a query line");
}

enum class Mode { Auto, Poly, Oracle };

Mode mode_of(const Options& opt) {
    if (opt.engine == "auto") return Mode::Auto;
    if (opt.engine == "poly") return Mode::Poly;
    if (opt.engine == "oracle") return Mode::Oracle;
    fail(ErrorCode::Usage, "--engine must be auto, poly, or oracle");
}

struct Routing {
    std::optional<Fragment> fragment;
    LanguageProfile prof;
};

Routing route(const AbductionInstance& inst) {
    Routing r;
    r.prof = profile(inst.kb);
    r.fragment = detect_fragment(r.prof);
    return r;
}

std::string poly_label(Fragment f) {
    return std::string("POLY(") + fragment_name(f) + ")";
}

// facet / relevant with auto routing.
std::pair<bool, std::string> decide_facet(const FacetInstance& fi, bool relevance, Mode mode,
                                          const Options& opt) {
    Routing r = route(fi.base);
    const bool licensed = r.fragment.has_value();
    if (mode == Mode::Poly && !licensed)
        fail(ErrorCode::WrongFragment, "no polynomial algorithm covers this instance");
    if (mode != Mode::Oracle && licensed) {
        bool ans = relevance ? relevance_poly(fi, *r.fragment, opt.engine_config())
                             : isfacet_poly(fi, *r.fragment, opt.engine_config());
        return {ans, poly_label(*r.fragment)};
    }
    bool ans = relevance ? is_relevant_oracle(fi) : is_facet_oracle(fi);
    return {ans, "ORACLE"};
}

std::pair<DivAnswer, std::string> decide_diverse(const DivInstance& di, Mode mode,
                                                 const Options& opt) {
    LanguageProfile prof = profile(di.base.kb);
    const bool aff = prof.affine2_form;
    const bool ep = prof.ep_form;
    if (mode == Mode::Poly && !aff && !ep)
        fail(ErrorCode::WrongFragment, "no polynomial diversity algorithm covers this instance");
    if (mode != Mode::Oracle && aff) return {div_affine2(di), "POLY(affine2)"};
    if (mode != Mode::Oracle && ep) return {div_ep(di), "POLY(ep)"};
    (void)opt;
    return {div_oracle(di), "ORACLE"};
}

int dispatch(const std::string& cmd, const Options& opt, const std::string& file,
             const std::string& var_flag, std::optional<std::uint32_t> k_flag, bool want_witness,
             const std::string& problem_flag, const std::string& rule,
             const std::string& defs_file, const GenConfig& gen_cfg, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    QueryOutput q;
    q.command = cmd;
    Mode mode = mode_of(opt);

    auto load = [&]() { return parse_instance(read_file(file)); };

    if (cmd == "sets" || cmd == "minimal") {
        auto parsed = load();
        auto rep = report(parsed.base);
        if (cmd == "sets") {
            Json a;
            a["explanation_count"] = rep.explanations.size();
            a["explanations"] = set_list(parsed.base, rep.explanations);
            a["minimal"] = set_list(parsed.base, rep.minimal);
            a["relevant"] = name_list(parsed.base, rep.relevant);
            a["necessary"] = name_list(parsed.base, rep.necessary);
            a["facets"] = name_list(parsed.base, rep.facets);
            q.answer = a;
        } else {
            q.answer = set_list(parsed.base, rep.minimal);
        }
        q.engine = "ORACLE";
    } else if (cmd == "facet" || cmd == "relevant") {
        auto parsed = load();
        FacetInstance fi{parsed.base, resolve_query(parsed, var_flag)};
        auto [ans, engine] = decide_facet(fi, cmd == "relevant", mode, opt);
        q.answer = ans;
        q.engine = engine;
        q.verdicts.push_back(verdict(route(parsed.base).prof,
                                     cmd == "facet" ? Problem::IsFacet : Problem::Relevance));
    } else if (cmd == "diverse") {
        auto parsed = load();
        std::uint32_t k = k_flag ? *k_flag
                                 : (parsed.k ? *parsed.k
                                             : (fail(ErrorCode::Usage,
                                                     "no distance bound: pass -k or add a k line"),
                                                0));
        DivInstance di{parsed.base, k};
        auto [ans, engine] = decide_diverse(di, mode, opt);
        q.answer = ans.diverse;
        q.engine = engine;
        if (want_witness && ans.witness) q.witness = witness_json(parsed.base, *ans.witness);
        q.verdicts.push_back(verdict(profile(parsed.base.kb), Problem::DivAbd));
    } else if (cmd == "classify") {
        auto parsed = load();
        LanguageProfile prof = profile(parsed.base.kb);
        std::vector<Problem> problems;
        if (problem_flag.empty())
            problems = {Problem::Abd, Problem::IsFacet, Problem::Relevance, Problem::DivAbd};
        else if (problem_flag == "abd") problems = {Problem::Abd};
        else if (problem_flag == "isfacet") problems = {Problem::IsFacet};
        else if (problem_flag == "relevance") problems = {Problem::Relevance};
        else if (problem_flag == "divabd") problems = {Problem::DivAbd};
        else fail(ErrorCode::Usage, "--problem must be abd|isfacet|relevance|divabd");
        Json a;
        for (Problem p : problems) {
            auto v = verdict(prof, p);
            a[problem_name(p)] = verdict_name(v.verdict);
            q.verdicts.push_back(std::move(v));
        }
        q.answer = a;
        q.engine = "ORACLE";
    } else if (cmd == "reduce") {
        auto parsed = load();
        DefinitionSet defs;
        if (!defs_file.empty()) defs = parse_definitions(read_file(defs_file));
        std::string text;
        if (rule == "efpp") {
            text = render(efpp_substitute(parsed, defs));
        } else if (rule == "abd2facet") {
            auto fi = abd_to_isfacet(parsed.base, defs_file.empty() ? nullptr : &defs);
            ParsedInstance outp{fi.base, fi.query, std::nullopt};
            text = render(outp);
        } else if (rule == "abd2div") {
            auto di = abd_to_div(parsed.base, defs_file.empty() ? nullptr : &defs);
            ParsedInstance outp{di.base, std::nullopt, di.k};
            text = render(outp);
        } else if (rule == "elimpos") {
            FacetInstance fi{parsed.base, resolve_query(parsed, var_flag)};
            auto res = elim_pos_units(fi);
            if (res.resolved) {
                // canonical fixed no-instance: the lone hypothesis is
                // necessary, hence not a facet
                text = "eq t t\nhyp t\nman t\nquery t\n";
            } else {
                ParsedInstance outp{res.out.base, res.out.query, std::nullopt};
                text = render(outp);
            }
        } else if (rule == "negunit") {
            auto fi = neg_unit_to_facet(parsed.base);
            ParsedInstance outp{fi.base, fi.query, std::nullopt};
            text = render(outp);
        } else if (rule == "pos2div") {
            if (!k_flag && !parsed.k)
                fail(ErrorCode::Usage, "pos2div needs -k or a k line");
            auto di = pos2sat_to_div(parsed.base, k_flag ? *k_flag : *parsed.k);
            ParsedInstance outp{di.base, std::nullopt, di.k};
            text = render(outp);
        } else {
            fail(ErrorCode::Usage, "--rule must be efpp|abd2facet|elimpos|negunit|abd2div|pos2div");
        }
        q.answer = text;
        q.text = text;
        q.engine = "ORACLE";
    } else if (cmd == "gen") {
        std::string text = generate(gen_cfg);
        q.answer = text;
        q.text = text;
        q.engine = "ORACLE";
    } else if (cmd == "check") {
        auto parsed = load();
        Routing r = route(parsed.base);
        Json mismatches = Json::array();
        std::size_t checked = 0;
        for (Var h : parsed.base.hyps) {
            FacetInstance fi{parsed.base, h};
            bool oracle_facet = is_facet_oracle(fi);
            bool oracle_rel = is_relevant_oracle(fi);
            if (r.fragment) {
                ++checked;
                bool poly_facet = isfacet_poly(fi, *r.fragment, opt.engine_config());
                bool poly_rel = relevance_poly(fi, *r.fragment, opt.engine_config());
                if (poly_facet != oracle_facet)
                    mismatches.push_back({{"var", parsed.base.vars.name(h)},
                                          {"problem", "facet"},
                                          {"poly", poly_facet},
                                          {"oracle", oracle_facet}});
                if (poly_rel != oracle_rel)
                    mismatches.push_back({{"var", parsed.base.vars.name(h)},
                                          {"problem", "relevance"},
                                          {"poly", poly_rel},
                                          {"oracle", oracle_rel}});
            }
        }
        LanguageProfile prof = r.prof;
        if (prof.affine2_form || prof.ep_form) {
            const auto kmax = static_cast<std::uint32_t>(parsed.base.hyps.size());
            for (std::uint32_t k = 0; k <= kmax; ++k) {
                DivInstance di{parsed.base, k};
                auto poly = prof.affine2_form ? div_affine2(di) : div_ep(di);
                auto oracle = div_oracle(di);
                ++checked;
                if (poly.diverse != oracle.diverse)
                    mismatches.push_back({{"k", k},
                                          {"problem", "diverse"},
                                          {"poly", poly.diverse},
                                          {"oracle", oracle.diverse}});
            }
        }
        Json a;
        a["checked"] = checked;
        a["ok"] = mismatches.empty();
        a["mismatches"] = mismatches;
        q.answer = a;
        q.engine = r.fragment ? poly_label(*r.fragment) : "ORACLE";
    } else {
        fail(ErrorCode::Usage, "unknown command");
    }

    const auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    emit(q, opt, ms, out);
    return 0;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ParseError:
        case ErrorCode::ScopeError:
        case ErrorCode::Usage:
        case ErrorCode::NotSubsetOfH:
        case ErrorCode::MissingDefinition:
        case ErrorCode::InvalidDefinition:
        case ErrorCode::NoEquality:
        case ErrorCode::NotOneValid:
        case ErrorCode::NoNegUnit:
        case ErrorCode::NotPos2Cnf:
            return 64;
        case ErrorCode::WrongFragment:
            return 65;
        case ErrorCode::BudgetExceeded:
            return 66;
        default:
            return 67;
    }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"faceted propositional abduction engine"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--engine", opt.engine, "auto|poly|oracle")->capture_default_str();
    app.add_flag("--json", opt.json, "emit one JSON object");
    app.add_option("--budget", opt.budget, "brute-force model budget")->capture_default_str();

    std::string file, var_flag, problem_flag, rule, defs_file, fragment = "dualhorn";
    std::optional<std::uint32_t> k_flag;
    bool want_witness = false;
    GenConfig gen_cfg;

    auto add_file = [&](CLI::App* sub) {
        sub->add_option("file", file, "instance file")->required();
    };

    auto* sets = app.add_subcommand("sets", "full explanation report");
    add_file(sets);
    auto* facet = app.add_subcommand("facet", "is the variable a facet");
    add_file(facet);
    facet->add_option("--var", var_flag, "query variable");
    auto* relevant = app.add_subcommand("relevant", "is the variable relevant");
    add_file(relevant);
    relevant->add_option("--var", var_flag, "query variable");
    auto* minimal = app.add_subcommand("minimal", "subset-minimal explanations");
    add_file(minimal);
    auto* diverse = app.add_subcommand("diverse", "are there k-diverse explanations");
    add_file(diverse);
    std::uint32_t k_value = 0;
    auto* kopt = diverse->add_option("-k", k_value, "distance bound");
    diverse->add_flag("--witness", want_witness, "include a witness pair");
    auto* classify = app.add_subcommand("classify", "complexity verdicts for the language");
    add_file(classify);
    classify->add_option("--problem", problem_flag, "abd|isfacet|relevance|divabd");
    auto* reduce = app.add_subcommand("reduce", "apply an instance transformer");
    add_file(reduce);
    reduce->add_option("--rule", rule, "efpp|abd2facet|elimpos|negunit|abd2div|pos2div")
        ->required();
    reduce->add_option("--defs", defs_file, "definition file");
    reduce->add_option("--var", var_flag, "query variable (elimpos)");
    auto* kopt2 = reduce->add_option("-k", k_value, "distance bound (pos2div)");
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    std::string frag_flag = "dualhorn";
    gen->add_option("--fragment", frag_flag, "imp|dualhorn|horn|affine2|en|ep|pos2cnf")
        ->capture_default_str();
    gen->add_option("--vars", gen_cfg.n_vars, "variable count")->capture_default_str();
    gen->add_option("--atoms", gen_cfg.n_atoms, "atom count")->capture_default_str();
    gen->add_option("--seed", gen_cfg.seed, "rng seed")->capture_default_str();
    auto* check = app.add_subcommand("check", "differential polynomial vs oracle");
    add_file(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help goes to stdout with status 0
            out << app.help();
            return 0;
        }
        err << e.what() << '\n';
        return 64;
    }

    try {
        if (kopt->count() || kopt2->count()) k_flag = k_value;
        gen_cfg.fragment = gen_fragment_from(frag_flag);
        std::string cmd = app.get_subcommands().front()->get_name();
        return dispatch(cmd, opt, file, var_flag, k_flag, want_witness, problem_flag, rule,
                        defs_file, gen_cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 67;
    }
}

} // namespace fabd
