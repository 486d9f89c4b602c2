// Command-line front end: evaluate queries, classify license files,
// translate to logic, and batch-verify the engine against the semantics.
//
// Exit codes: 0 true/valid/agreement, 1 false/invalid, 2 fuel exhausted,
// 3 parse error, 4 oracle capacity exceeded, 5 other errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xrml/engine.hpp"
#include "xrml/fragments.hpp"
#include "xrml/generator.hpp"
#include "xrml/logic.hpp"
#include "xrml/parser.hpp"
#include "xrml/printer.hpp"
#include "xrml/reductions.hpp"

namespace {

constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitFuel = 2;
constexpr int kExitParse = 3;
constexpr int kExitCapacity = 4;
constexpr int kExitError = 5;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

uint64_t default_fuel() {
    if (const char* env = std::getenv("XRML_FUEL")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return 1000000;
}

struct CommonOpts {
    std::string mode = "corrected";
    std::string union_mode = "free";
    std::string format = "human";
    uint64_t fuel = default_fuel();
    bool negation = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mode = true) {
    if (with_mode)
        cmd->add_option("--mode", o.mode, "corrected or legacy")
            ->check(CLI::IsMember({"corrected", "legacy"}));
    cmd->add_option("--fuel", o.fuel, "step budget (default from XRML_FUEL or 1000000)");
    cmd->add_option("--union", o.union_mode,
                    "free (variables range over singletons) or full (all subsets)")
        ->check(CLI::IsMember({"free", "full"}));
    cmd->add_option("--format", o.format, "human or json")
        ->check(CLI::IsMember({"human", "json"}));
    cmd->add_flag("--negation", o.negation, "enable the negation extension");
}

struct LoadedQuery {
    xrml::Workspace ws;
    xrml::Query query;
};

LoadedQuery load(const std::string& lic_path, const std::string& q_path, bool negation) {
    LoadedQuery out;
    out.ws = xrml::parse_license_file(read_file(lic_path), negation, lic_path);
    xrml::ConcPtr goal = xrml::parse_query(read_file(q_path), out.ws.decls, q_path);
    out.query = out.ws.make_query(goal);
    return out;
}

xrml::EngineOptions engine_options(const CommonOpts& o) {
    xrml::EngineOptions opt;
    opt.mode = o.mode == "legacy" ? xrml::EngineMode::Legacy : xrml::EngineMode::Corrected;
    opt.fuel = o.fuel;
    opt.union_mode =
        o.union_mode == "full" ? xrml::UnionMode::Full : xrml::UnionMode::Free;
    return opt;
}

int verdict_exit(xrml::Verdict v) {
    switch (v) {
        case xrml::Verdict::True: return kExitTrue;
        case xrml::Verdict::False: return kExitFalse;
        case xrml::Verdict::FuelExhausted: return kExitFuel;
    }
    return kExitError;
}

// Resource universe for the oracle when the engine cannot run (negation
// queries): every closed grant mentioned in the input.
std::vector<xrml::GrantPtr> input_resources(const xrml::Query& q) {
    std::vector<xrml::GrantPtr> out;
    auto add = [&](const xrml::GrantPtr& g) {
        if (g->closed_ && !xrml::contains_grant(out, g)) out.push_back(g);
        std::vector<xrml::GrantPtr> nested;
        xrml::detail::collect_resources_grant(g, nested);
        for (auto& n : nested)
            if (!xrml::contains_grant(out, n)) out.push_back(n);
    };
    for (const auto& l : q.licenses) add(l.grant);
    for (const auto& t : q.trusted) add(t.grant);
    if (q.goal) xrml::collect_closed_resources(q.goal, out);
    return out;
}

int cmd_query(const std::string& lic, const std::string& qf, const CommonOpts& o,
              const std::string& trace_path, bool trace_stdout) {
    LoadedQuery in = load(lic, qf, o.negation);
    xrml::EngineOptions opt = engine_options(o);

    if (xrml::mentions_negation(in.query)) {
        // The evaluation algorithms reject negation; answer through the
        // translation and the validity oracle instead.
        xrml::logic::OracleOptions oopt;
        oopt.resolve_val_eagerly = true;
        xrml::logic::LogicContext ctx(in.ws.decls, opt.union_mode, oopt);
        xrml::logic::TranslationParams params;
        params.licenses = in.query.licenses;
        params.A = input_resources(in.query);
        params.E = in.query.excluded;
        params.allow_negation = true;
        ctx.set_resource_universe(params.A);
        bool valid;
        try {
            valid = ctx.acceptably_valid(xrml::logic::query_formula(ctx, in.query, params));
        } catch (const xrml::logic::CapacityError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitCapacity;
        }
        if (o.format == "json") {
            nlohmann::json j;
            j["schema_version"] = 1;
            j["verdict"] = valid ? "true" : "false";
            j["path"] = "oracle";
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "verdict: " << (valid ? "true" : "false")
                      << " (negation query, decided by the semantics)\n";
        }
        return valid ? kExitTrue : kExitFalse;
    }

    if (opt.union_mode == xrml::UnionMode::Free && xrml::mentions_union(in.query) &&
        o.format != "json" && !trace_stdout)
        std::cerr << "note: the query mentions principal unions; variables still range "
                     "over singletons (--union full widens them)\n";

    xrml::EngineOutcome out =
        opt.mode == xrml::EngineMode::Legacy
            ? xrml::legacy_query(in.ws.decls, in.query, opt.fuel, opt)
            : xrml::query2(in.ws.decls, in.query, opt);

    if (!trace_path.empty() && out.trace) {
        std::ofstream tf(trace_path);
        tf << xrml::trace_to_json(*out.trace).dump(2) << "\n";
    }
    if (trace_stdout && out.trace) {
        std::cout << xrml::trace_to_json(*out.trace).dump(2) << "\n";
        return verdict_exit(out.verdict);
    }

    if (o.format == "json") {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["verdict"] = xrml::verdict_name(out.verdict);
        j["fuel_used"] = out.stats.fuel_used;
        j["holds_height"] = out.stats.max_holds_height;
        j["trace_nodes"] = out.trace ? out.trace->node_count() : 0;
        nlohmann::json a = nlohmann::json::array();
        for (const auto& g : out.resources_touched) a.push_back(xrml::print(g));
        j["resources_touched"] = std::move(a);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "verdict: " << xrml::verdict_name(out.verdict) << "\n";
        std::cout << "fuel used: " << out.stats.fuel_used << "\n";
        if (out.trace)
            std::cout << "trace: height " << out.trace->height() << ", "
                      << out.trace->node_count() << " nodes (holds height "
                      << out.stats.max_holds_height << ")\n";
        std::cout << "resources touched (A): " << out.resources_touched.size() << "\n";
        for (const auto& g : out.resources_touched)
            std::cout << "  <" << xrml::print(g) << ">\n";
    }
    return verdict_exit(out.verdict);
}

int cmd_check(const std::string& lic, int n, int h, const CommonOpts& o) {
    xrml::Workspace ws = xrml::parse_license_file(read_file(lic), o.negation, lic);
    xrml::Query q = ws.make_query(nullptr);
    xrml::UnionMode m =
        o.union_mode == "full" ? xrml::UnionMode::Full : xrml::UnionMode::Free;
    xrml::FragmentReport r = xrml::classify(ws.decls, q, n, h, m);
    if (o.format == "json") {
        std::cout << xrml::report_to_json(r).dump(2) << "\n";
        return kExitTrue;
    }
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    std::cout << "restrained (L0): " << yn(r.in_l0) << "\n";
    std::cout << "union-free (L1): " << yn(r.in_l1) << "\n";
    std::cout << "max n-restriction: " << r.max_n_restriction << " (bound " << r.n_param
              << ": " << yn(r.n_ok) << ")\n";
    std::cout << "hierarchical: " << yn(r.hierarchical);
    if (r.conservative_edges) std::cout << " (conservative may-affect edges present)";
    std::cout << "\n";
    if (r.hierarchical) {
        std::cout << "  order:\n";
        for (const auto& s : r.order_labels) std::cout << "    " << s << "\n";
        std::cout << "holds height bound: " << r.height_bound << "\n";
    } else {
        std::cout << "  cycle:\n";
        for (const auto& s : r.cycle_labels) std::cout << "    " << s << "\n";
    }
    std::cout << "polynomial path: " << yn(r.polynomial_path) << "\n";
    if (!r.cost_note.empty()) std::cout << "  " << r.cost_note << "\n";
    for (const auto& off : r.offending) {
        std::cout << "offending";
        if (off.line) std::cout << " (line " << off.line << ")";
        std::cout << ": " << off.reason << "\n";
        if (!off.item.empty()) std::cout << "    " << off.item << "\n";
    }
    return kExitTrue;
}

int cmd_translate(const std::string& lic, const std::string& qf, const std::string& variant,
                  const std::string& a_file, int capacity, const CommonOpts& o) {
    LoadedQuery in = load(lic, qf, o.negation);
    xrml::EngineOptions eopt = engine_options(o);
    eopt.capture_trace = false;

    xrml::logic::TranslationParams params;
    params.licenses = in.query.licenses;
    params.E = in.query.excluded;
    params.allow_negation = o.negation;
    params.variant = variant == "alt1"   ? xrml::logic::Variant::Alt1
                     : variant == "alt2" ? xrml::logic::Variant::Alt2
                                         : xrml::logic::Variant::Main;

    std::string a_source;
    std::string engine_verdict = "not run";
    if (!a_file.empty()) {
        // user-supplied A: the trusted grants of a license file
        xrml::Workspace aws = xrml::parse_license_file(read_file(a_file), o.negation, a_file);
        for (const auto& t : aws.trusted) params.A.push_back(t.grant);
        a_source = "user-supplied";
        std::cerr << "note: the engine correspondence is only claimed for the "
                     "engine-harvested resource set\n";
    } else if (xrml::mentions_negation(in.query)) {
        params.A = input_resources(in.query);
        a_source = "input-derived (engine rejects negation)";
    } else {
        xrml::EngineOutcome out = xrml::query2(in.ws.decls, in.query, eopt);
        if (out.verdict == xrml::Verdict::FuelExhausted) {
            params.A = input_resources(in.query);
            a_source = "input-derived (engine ran out of fuel)";
            engine_verdict = "fuel-exhausted";
        } else {
            params.A = out.resources_touched;
            a_source = "engine-harvested";
            engine_verdict = xrml::verdict_name(out.verdict);
        }
    }

    xrml::logic::OracleOptions oopt;
    if (capacity > 0) oopt.max_branch_atoms = capacity;
    xrml::logic::LogicContext ctx(in.ws.decls, eopt.union_mode, oopt);
    ctx.set_resource_universe(params.A);
    xrml::logic::FormulaPtr f = xrml::logic::query_formula(ctx, in.query, params);

    std::string verdict = "unknown";
    int code = kExitTrue;
    try {
        bool valid = ctx.acceptably_valid(f);
        verdict = valid ? "valid" : "invalid";
        code = valid ? kExitTrue : kExitFalse;
    } catch (const xrml::logic::CapacityError& e) {
        verdict = std::string("capacity exceeded: ") + e.what();
        code = kExitCapacity;
    }

    if (o.format == "json") {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["variant"] = variant;
        j["a_source"] = a_source;
        j["a_size"] = params.A.size();
        j["engine"] = engine_verdict;
        j["verdict"] = verdict;
        j["formula"] = xrml::logic::formula_to_json(f);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "formula (" << variant << "):\n  " << xrml::logic::print_formula(f)
                  << "\n";
        std::cout << "A (" << a_source << "): " << params.A.size() << " resources\n";
        std::cout << "engine: " << engine_verdict << "\n";
        std::cout << "verdict: " << verdict << "\n";
    }
    return code;
}

int cmd_encode(const std::string& kind, const std::string& input, const std::string& prefix) {
    xrml::reductions::Encoded enc;
    std::string text = read_file(input);
    if (kind == "ham") {
        enc = xrml::reductions::encode_hamiltonian(xrml::reductions::parse_edge_list(text));
    } else if (kind == "sat-b" || kind == "sat-c" || kind == "sat-neg") {
        xrml::reductions::Cnf3 f = xrml::reductions::parse_dimacs(text);
        enc = kind == "sat-b"   ? xrml::reductions::encode_3sat_b(f)
              : kind == "sat-c" ? xrml::reductions::encode_3sat_c(f)
                                : xrml::reductions::encode_3sat_neg(f);
    } else if (kind == "pcp") {
        // one "s t" pair per line
        xrml::reductions::PcpInstance inst;
        std::istringstream in(text);
        std::string s, t;
        while (in >> s >> t) inst.pairs.push_back({s, t});
        if (inst.pairs.empty()) throw std::runtime_error("no pairs in " + input);
        enc = xrml::reductions::encode_pcp(inst);
    } else {
        throw std::runtime_error("unknown encoding kind " + kind);
    }
    std::string lic = xrml::print_license_file(enc.decls, enc.query);
    std::string q = xrml::print_query_file(enc.query.goal);
    if (prefix.empty()) {
        std::cout << lic << "# query:\n# " << xrml::print_query_goal(enc.query.goal) << "\n";
    } else {
        std::ofstream lf(prefix + ".lic");
        lf << lic;
        std::ofstream qf(prefix + ".q");
        qf << q;
        std::cout << "wrote " << prefix << ".lic and " << prefix << ".q\n";
    }
    return kExitTrue;
}

int cmd_verify(uint64_t seed, int count, int max_principals, int max_licenses,
               const CommonOpts& o) {
    xrml::gen::Rng rng(seed);
    xrml::gen::Bounds bounds;
    bounds.max_principals = max_principals;
    bounds.max_licenses = max_licenses;

    xrml::EngineOptions eopt = engine_options(o);
    eopt.capture_trace = false;

    int agree = 0, checked = 0, skipped = 0;
    for (int i = 0; i < count; ++i) {
        xrml::gen::Generated g = xrml::gen::random_query(rng, bounds);
        xrml::logic::CorrespondenceReport rep =
            xrml::logic::check_correspondence(g.decls, g.query, eopt);
        if (!rep.oracle_ran) {
            if (rep.engine == xrml::Verdict::FuelExhausted) {
                ++skipped;  // nonterminating instance, nothing to compare
                continue;
            }
            std::cout << "query " << i << ": oracle error: " << rep.error << "\n";
            ++checked;
            continue;
        }
        ++checked;
        if (rep.agree) {
            ++agree;
        } else {
            std::cout << "query " << i << ": DISAGREEMENT (engine "
                      << xrml::verdict_name(rep.engine) << ", semantics "
                      << (rep.oracle_valid ? "valid" : "invalid") << ")\n";
            std::cout << xrml::print_license_file(g.decls, g.query);
            std::cout << xrml::print_query_file(g.query.goal);
        }
    }
    if (o.format == "json") {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["seed"] = seed;
        j["count"] = count;
        j["checked"] = checked;
        j["agree"] = agree;
        j["skipped_nonterminating"] = skipped;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "agreement: " << agree << "/" << checked << " (" << skipped
                  << " skipped as nonterminating)\n";
    }
    return agree == checked ? kExitTrue : kExitFalse;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xrml: license-fragment evaluation, analysis and semantics tools"};
    // keep -h free for the `check --h` bound
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    // query
    auto* q = app.add_subcommand("query", "evaluate a query against a license file");
    std::string q_lic, q_query, q_trace;
    CommonOpts q_opts;
    q->add_option("license-file", q_lic)->required();
    q->add_option("query-file", q_query)->required();
    q->add_option("--trace", q_trace, "write the call-tree JSON to a file");
    add_common(q, q_opts);

    // trace
    auto* tr = app.add_subcommand("trace", "evaluate and print the call-tree JSON");
    std::string t_lic, t_query;
    CommonOpts t_opts;
    tr->add_option("license-file", t_lic)->required();
    tr->add_option("query-file", t_query)->required();
    add_common(tr, t_opts);

    // check
    auto* ch = app.add_subcommand("check", "classify a license file's fragment membership");
    std::string c_lic;
    int c_n = 0, c_h = -1;
    CommonOpts c_opts;
    ch->add_option("license-file", c_lic)->required();
    ch->add_option("--n", c_n, "antecedent-only principal variable bound");
    ch->add_option("--h", c_h, "call-tree height bound (-1: from |L|)");
    add_common(ch, c_opts, false);

    // translate
    auto* trn = app.add_subcommand("translate", "translate a query into logic");
    std::string x_lic, x_query, x_variant = "main", x_afile;
    int x_capacity = 0;
    CommonOpts x_opts;
    trn->add_option("license-file", x_lic)->required();
    trn->add_option("query-file", x_query)->required();
    trn->add_option("--variant", x_variant)->check(CLI::IsMember({"main", "alt1", "alt2"}));
    trn->add_option("--a-file", x_afile, "use the trusted grants of this file as A");
    trn->add_option("--capacity", x_capacity, "validity search branching budget");
    add_common(trn, x_opts, false);

    // encode
    auto* en = app.add_subcommand("encode",
                                  "turn a graph, CNF or pair list into a license file");
    std::string e_kind, e_input, e_prefix;
    en->add_option("kind", e_kind, "ham, sat-b, sat-c, sat-neg or pcp")
        ->required()
        ->check(CLI::IsMember({"ham", "sat-b", "sat-c", "sat-neg", "pcp"}));
    en->add_option("input-file", e_input)->required();
    en->add_option("-o,--output-prefix", e_prefix, "write <prefix>.lic and <prefix>.q");

    // verify
    auto* vf = app.add_subcommand("verify", "random correspondence check");
    uint64_t v_seed = 1;
    int v_count = 100, v_maxp = 4, v_maxl = 5;
    CommonOpts v_opts;
    vf->add_option("--seed", v_seed);
    vf->add_option("--count", v_count);
    vf->add_option("--max-principals", v_maxp);
    vf->add_option("--max-licenses", v_maxl);
    add_common(vf, v_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (q->parsed()) return cmd_query(q_lic, q_query, q_opts, q_trace, false);
        if (tr->parsed()) return cmd_query(t_lic, t_query, t_opts, "", true);
        if (ch->parsed()) return cmd_check(c_lic, c_n, c_h, c_opts);
        if (trn->parsed())
            return cmd_translate(x_lic, x_query, x_variant, x_afile, x_capacity, x_opts);
        if (en->parsed()) return cmd_encode(e_kind, e_input, e_prefix);
        if (vf->parsed()) return cmd_verify(v_seed, v_count, v_maxp, v_maxl, v_opts);
    } catch (const xrml::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const xrml::logic::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
