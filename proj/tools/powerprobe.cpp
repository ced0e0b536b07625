// powerprobe: generate instances, run identity testing / interpolation against
// simulated or replayed power oracles, and drive bounds-lab sweeps.
//
// stdout carries one JSON document per invocation; diagnostics go to stderr.
// Exit codes: 0 success (or equal), 1 different (identity only), 2 error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "powerprobe/powerprobe.hpp"

namespace {

using namespace powerprobe;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDifferent = 1;
constexpr int kExitError = 2;

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError("cannot write " + path);
    out << text;
}

json coeffs_json(const Polynomial& f) {
    json arr = json::array();
    for (u64 c : f.coeffs()) arr.push_back(std::to_string(c));
    return arr;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

double env_budget() {
    if (const char* raw = std::getenv("POWERPROBE_BUDGET")) {
        char* end = nullptr;
        const double v = std::strtod(raw, &end);
        if (end == raw || *end != '\0' || !(v > 0)) throw CliError("POWERPROBE_BUDGET must be a positive number");
        return v;
    }
    return lab::kDefaultBudget;
}

struct Options {
    std::optional<u64> p, e, d;
    u64 seed = 0;
    double c1 = 1.0, c2 = 1.0, c3 = 1.0;
    u64 n = 1;
    u64 m_cap = 64;
    std::string instance_path;
    std::string out;
    std::string transcript_in;
    std::string transcript_out;
    std::string grid_path;
    bool force = false;
    bool redact = false;
    bool square_free = false;
    bool with_g = false;
    bool non_perfect_power = false;
    bool g_equal_f = false;
    u64 a = 0;
};

void add_field_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--p", o.p, "prime modulus");
    cmd->add_option("--e", o.e, "exponent, a divisor of p-1");
    cmd->add_option("--d", o.d, "degree of the hidden polynomial");
}

u64 need(const std::optional<u64>& v, const char* name) {
    if (!v) throw CliError(std::string("--") + name + " is required");
    return *v;
}

/// Loads the instance from a file or builds it from inline parameters; exactly one source.
Instance load_instance(const Options& o, const GenOptions& inline_opts) {
    const bool inline_given = o.p || o.e || o.d;
    if (!o.instance_path.empty() && inline_given) throw CliError("give either an instance file or inline --p/--e/--d, not both");
    if (!o.instance_path.empty()) return io::read_instance(read_file(o.instance_path));
    if (!inline_given) throw CliError("an instance file or inline --p/--e/--d is required");
    return gen_instance(need(o.p, "p"), need(o.e, "e"), need(o.d, "d"), o.seed, inline_opts);
}

int cmd_gen(const Options& o) {
    GenOptions g;
    g.require_square_free = o.square_free;
    g.with_g = o.with_g;
    g.require_non_perfect_power_ratio = o.non_perfect_power;
    g.g_equals_f = o.g_equal_f;
    Instance inst = gen_instance(need(o.p, "p"), need(o.e, "e"), need(o.d, "d"), o.seed, g);
    if (o.redact) {
        inst.f.reset();
        inst.g.reset();
    }
    const std::string text = io::write_instance(inst);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        write_file(o.out, text);
        json j;
        j["written"] = o.out;
        std::cout << j.dump() << '\n';
    }
    return kExitOk;
}

int cmd_identity(const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    const Instance inst = load_instance(o, {.require_non_perfect_power_ratio = true});
    if (!inst.f || !inst.g) throw CliError("identity testing needs both f and g in the instance");
    const WindowParams window = compute_window(inst.p, inst.e, inst.d, o.c1);
    LocalOracle of = inst.oracle_f();
    LocalOracle og = inst.oracle_g();
    const IdentityVerdict v = identity_test(of, og, window);

    json out;
    out["verdict"] = v.different() ? "Different" : "IndistinguishableOnWindow";
    out["witness"] = v.witness ? json(*v.witness) : json(nullptr);
    out["query_count"] = of.query_count() + og.query_count();
    out["candidates_examined"] = 1;
    out["wall_time_ms"] = elapsed_ms(start);
    out["H"] = window.H;
    out["condition_holds"] = window.condition_holds;
    out["query_bound"] = o.c2 * window_shape(inst.p, inst.e, inst.d);
    if (!o.transcript_out.empty()) write_file(o.transcript_out, io::write_transcript(of.transcript()));
    std::cout << out.dump() << '\n';
    return v.different() ? kExitDifferent : kExitOk;
}

int cmd_interpolate(const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    const Instance inst = load_instance(o, {.require_square_free = true});
    if (inst.f && !o.force && !is_square_free(*inst.f)) throw CliError("square-free required (pass --force to try anyway)");

    const PrimeField field(inst.p);
    std::optional<LocalOracle> local;
    std::optional<ReplayOracle> replay;
    PowerOracle* oracle = nullptr;
    if (!o.transcript_in.empty()) {
        std::ifstream in(o.transcript_in, std::ios::binary);
        if (!in) throw CliError("cannot open " + o.transcript_in);
        const Transcript t = io::read_transcript(in);
        if (t.modulus() != inst.p || t.exponent() != inst.e) throw CliError("transcript (p, e) does not match the instance");
        oracle = &replay.emplace(t);
    } else {
        if (!inst.f) throw CliError("instance is redacted; supply --transcript to replay oracle answers");
        oracle = &local.emplace(*inst.f, inst.e);
    }

    InterpolationParams params;
    params.n = o.n;
    params.c1 = o.c1;
    params.m_cap = o.m_cap;
    const InterpolationResult r = interpolate(*oracle, field, inst.d, params);
    if (!o.transcript_out.empty()) write_file(o.transcript_out, io::write_transcript(oracle->transcript()));

    json out;
    out["verdict"] = "recovered";
    out["recovered_f"] = coeffs_json(r.f);
    out["query_count"] = r.query_count;
    out["candidates_examined"] = r.candidates.size();
    out["survivors"] = r.step3.survivors;
    out["wall_time_ms"] = elapsed_ms(start);
    if (!r.degenerate_e1) {
        out["H"] = r.window.H;
        out["m"] = r.step3.m;
        out["h"] = r.step1.h;
        out["zeros"] = r.step1.zeros;
        out["query_bound"] = interpolation_query_bound(inst.d, o.n, r.step3.m, r.step3.survivors, r.window.H);
        out["asymptotic_query_bound"] = o.c3 * window_shape(inst.p, inst.e, inst.d);
    }
    int code = kExitOk;
    if (inst.f) {
        const bool match = r.f == *inst.f;
        out["matches_hidden"] = match;
        if (!match) {
            std::cerr << "error: recovered polynomial differs from the hidden one\n";
            code = kExitError;
        }
    }
    std::cout << out.dump() << '\n';
    return code;
}

int cmd_sweep(const Options& o) {
    const std::string text = read_file(o.grid_path);
    nlohmann::json grid_json;
    try {
        grid_json = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw CliError(std::string("malformed grid JSON: ") + ex.what());
    }
    const lab::GridSpec grid = lab::parse_grid(grid_json);
    const double budget = env_budget();
    const auto rows = lab::sweep(grid, budget);
    write_file(o.out, lab::to_csv(rows));

    json out;
    out["out"] = o.out;
    out["rows"] = rows.size();
    std::size_t budget_rows = 0, error_rows = 0;
    for (const auto& r : rows) {
        if (r.status == "budget") ++budget_rows;
        if (r.status == "error") ++error_rows;
        if (!r.detail.empty()) std::cerr << lab::experiment_name(r.experiment) << " p=" << r.p << " e=" << r.e << " d=" << r.d << ": " << r.detail << '\n';
    }
    out["budget_rows"] = budget_rows;
    out["error_rows"] = error_rows;
    out["budget"] = budget;
    std::cout << out.dump() << '\n';
    return kExitOk;
}

int cmd_roots(const Options& o) {
    const PrimeField field(need(o.p, "p"));
    const auto roots = field.extract_roots(o.a, need(o.e, "e"), o.n);
    json out;
    out["p"] = field.p();
    out["e"] = *o.e;
    out["n"] = o.n;
    out["A"] = o.a;
    out["roots"] = roots;
    std::cout << out.dump() << '\n';
    return kExitOk;
}

int cmd_window(const Options& o) {
    const u64 p = need(o.p, "p");
    if (!is_prime(p)) throw CliError("p must be prime");
    const WindowParams w = compute_window(p, need(o.e, "e"), need(o.d, "d"), o.c1);
    json out;
    out["H"] = w.H;
    out["c1"] = w.c1;
    out["cap"] = w.cap;
    out["condition_holds"] = w.condition_holds;
    std::cout << out.dump() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identity testing and interpolation of polynomials from power oracles"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "generate a seeded instance file");
    add_field_flags(gen, o);
    gen->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    gen->add_flag("--square-free", o.square_free, "require square-free hidden polynomials");
    gen->add_flag("--with-g", o.with_g, "also draw a second hidden polynomial g");
    gen->add_flag("--non-perfect-power", o.non_perfect_power, "draw g with f/g not a perfect power");
    gen->add_flag("--g-equal-f", o.g_equal_f, "set g = f");
    gen->add_flag("--redact", o.redact, "omit the hidden polynomials from the file");
    gen->add_option("--out", o.out, "output path (default: stdout)");

    auto* ident = app.add_subcommand("identity", "decide f = g from the two power oracles");
    ident->add_option("instance", o.instance_path, "instance JSON file");
    add_field_flags(ident, o);
    ident->add_option("--seed", o.seed, "seed for an inline instance");
    ident->add_option("--c1", o.c1, "window constant")->capture_default_str();
    ident->add_option("--c2", o.c2, "constant of the reported query bound")->capture_default_str();
    ident->add_option("--transcript-out", o.transcript_out, "write the f-oracle transcript (JSON Lines)");

    auto* interp = app.add_subcommand("interpolate", "recover a square-free f from its power oracle");
    interp->add_option("instance", o.instance_path, "instance JSON file");
    add_field_flags(interp, o);
    interp->add_option("--seed", o.seed, "seed for an inline instance");
    interp->add_option("--n", o.n, "index restriction n, a divisor of (p-1)/e")->capture_default_str();
    interp->add_option("--c1", o.c1, "window constant")->capture_default_str();
    interp->add_option("--c3", o.c3, "constant of the reported query bound")->capture_default_str();
    interp->add_option("--m-cap", o.m_cap, "largest m tried for the filter step")->capture_default_str();
    interp->add_flag("--force", o.force, "run even if the hidden f is not square-free");
    interp->add_option("--transcript", o.transcript_in, "replay oracle answers from a transcript");
    interp->add_option("--transcript-out", o.transcript_out, "write the oracle transcript (JSON Lines)");

    auto* sweep = app.add_subcommand("sweep", "run bounds-lab experiments over a grid");
    sweep->add_option("grid", o.grid_path, "grid JSON file")->required();
    sweep->add_option("--out", o.out, "CSV output path")->required();

    auto* roots = app.add_subcommand("roots", "solve x^e = A with n | ind x");
    roots->add_option("--p", o.p, "prime modulus")->required();
    roots->add_option("--e", o.e, "exponent, a divisor of p-1")->required();
    roots->add_option("--A", o.a, "right-hand side")->required();
    roots->add_option("--n", o.n, "index divisibility")->capture_default_str();

    auto* window = app.add_subcommand("window", "print the identity-test window");
    add_field_flags(window, o);
    window->add_option("--c1", o.c1, "window constant")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitError;
    }

    try {
        if (*gen) return cmd_gen(o);
        if (*ident) return cmd_identity(o);
        if (*interp) return cmd_interpolate(o);
        if (*sweep) return cmd_sweep(o);
        if (*roots) return cmd_roots(o);
        if (*window) return cmd_window(o);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
