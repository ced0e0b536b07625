#pragma once

// Power oracles x -> f(x)^e with exact query accounting, and the instance sampler.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "powerprobe/field.hpp"
#include "powerprobe/poly.hpp"
#include "powerprobe/rational.hpp"

namespace powerprobe {

struct TranscriptEntry {
    u64 x = 0;
    u64 answer = 0;
    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Ordered record of every query an oracle answered.
class Transcript {
public:
    Transcript() = default;
    Transcript(u64 p, u64 e) : p_(p), e_(e) {}

    u64 modulus() const { return p_; }
    u64 exponent() const { return e_; }
    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    std::size_t query_count() const { return entries_.size(); }
    /// Number of queries that repeated an earlier x.
    std::size_t repeated_count() const { return repeated_; }

    void record(u64 x, u64 answer) {
        auto [it, inserted] = index_.try_emplace(x, answer);
        if (!inserted) {
            ++repeated_;
            if (it->second != answer) throw std::logic_error("transcript records two answers for one input");
        }
        entries_.push_back({x, answer});
    }

    std::optional<u64> lookup(u64 x) const {
        auto it = index_.find(x);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const Transcript& a, const Transcript& b) {
        return a.p_ == b.p_ && a.e_ == b.e_ && a.entries_ == b.entries_;
    }

private:
    u64 p_ = 0;
    u64 e_ = 0;
    std::vector<TranscriptEntry> entries_;
    std::unordered_map<u64, u64> index_;
    std::size_t repeated_ = 0;
};

class TranscriptIncomplete : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Black box returning f(x)^e for x in F_p. Every call is appended to the transcript.
class PowerOracle {
public:
    PowerOracle(u64 p, u64 e) : transcript_(p, e) {}
    virtual ~PowerOracle() = default;
    PowerOracle(const PowerOracle&) = delete;
    PowerOracle& operator=(const PowerOracle&) = delete;

    u64 modulus() const { return transcript_.modulus(); }
    u64 exponent() const { return transcript_.exponent(); }

    u64 query(u64 x) {
        if (x >= modulus()) throw std::domain_error("oracle input outside F_p: " + std::to_string(x));
        const u64 a = answer(x);
        transcript_.record(x, a);
        return a;
    }

    const Transcript& transcript() const { return transcript_; }
    std::size_t query_count() const { return transcript_.query_count(); }

protected:
    virtual u64 answer(u64 x) = 0;

private:
    Transcript transcript_;
};

/// Oracle backed by a hidden polynomial that it never exposes.
class LocalOracle final : public PowerOracle {
public:
    LocalOracle(Polynomial hidden, u64 e) : PowerOracle(hidden.modulus(), e), hidden_(std::move(hidden)) {}

protected:
    u64 answer(u64 x) override { return zp::pow(hidden_.eval(x), exponent(), modulus()); }

private:
    Polynomial hidden_;
};

/// Oracle that answers from a stored transcript and fails on unseen inputs.
class ReplayOracle final : public PowerOracle {
public:
    explicit ReplayOracle(const Transcript& source) : PowerOracle(source.modulus(), source.exponent()) {
        for (const auto& entry : source.entries()) answers_.emplace(entry.x, entry.answer);
    }

protected:
    u64 answer(u64 x) override {
        auto it = answers_.find(x);
        if (it == answers_.end()) throw TranscriptIncomplete("transcript incomplete: no answer for x = " + std::to_string(x));
        return it->second;
    }

private:
    std::unordered_map<u64, u64> answers_;
};

/// Forwards each distinct input to the wrapped oracle once; repeats are served from memory.
class CachedOracle final : public PowerOracle {
public:
    explicit CachedOracle(PowerOracle& inner) : PowerOracle(inner.modulus(), inner.exponent()), inner_(inner) {}

    PowerOracle& inner() { return inner_; }
    std::size_t forwarded() const { return inner_.query_count(); }

protected:
    u64 answer(u64 x) override {
        auto it = cache_.find(x);
        if (it != cache_.end()) return it->second;
        const u64 a = inner_.query(x);
        cache_.emplace(x, a);
        return a;
    }

private:
    PowerOracle& inner_;
    std::unordered_map<u64, u64> cache_;
};

/// A hidden problem instance. Holding an Instance is the omniscient view;
/// algorithms only ever see oracles built from it.
struct Instance {
    u64 p = 0;
    u64 e = 1;
    u64 d = 1;
    std::optional<Polynomial> f;
    std::optional<Polynomial> g;
    u64 seed = 0;

    void validate() const {
        if (!is_prime(p)) throw std::domain_error("p must be prime");
        if (e == 0 || (p - 1) % e != 0) throw std::domain_error("e must divide p-1");
        auto check = [&](const std::optional<Polynomial>& poly, const char* name) {
            if (!poly) return;
            if (poly->modulus() != p || !poly->is_monic() || static_cast<u64>(poly->degree()) != d)
                throw std::domain_error(std::string("hidden ") + name + " must be monic of degree d");
        };
        check(f, "f");
        check(g, "g");
    }

    LocalOracle oracle_f() const {
        if (!f) throw std::domain_error("instance has no hidden f (redacted)");
        return LocalOracle(*f, e);
    }
    LocalOracle oracle_g() const {
        if (!g) throw std::domain_error("instance has no hidden g");
        return LocalOracle(*g, e);
    }
};

struct GenOptions {
    bool require_square_free = false;
    /// Also draw g with f/g not a nontrivial perfect power (implies with_g).
    bool require_non_perfect_power_ratio = false;
    bool with_g = false;
    bool g_equals_f = false;
    std::size_t max_attempts = 100000;
};

/// Deterministic sampler: the same (p, e, d, seed, options) always yields the same instance.
inline Instance gen_instance(u64 p, u64 e, u64 d, u64 seed, const GenOptions& opts = {}) {
    if (!is_prime(p)) throw std::domain_error("p must be prime");
    if (e == 0 || (p - 1) % e != 0) throw std::domain_error("e must divide p-1");
    if (d < 1) throw std::domain_error("degree d must be at least 1");
    if (d >= p) throw std::domain_error("degree d must be below p");
    if (opts.g_equals_f && opts.require_non_perfect_power_ratio)
        throw std::domain_error("f = g contradicts a non-perfect-power ratio");

    std::mt19937_64 rng(seed);
    auto draw_monic = [&] {
        std::vector<u64> c(d + 1);
        for (u64 i = 0; i < d; ++i) c[i] = rng() % p;
        c[d] = 1;
        return Polynomial(p, std::move(c));
    };
    std::optional<PrimeField> field;
    if (opts.require_non_perfect_power_ratio) field.emplace(p);

    Instance inst{p, e, d, std::nullopt, std::nullopt, seed};
    for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
        Polynomial f = draw_monic();
        if (opts.require_square_free && !is_square_free(f)) continue;
        inst.f = f;
        if (opts.g_equals_f) {
            inst.g = f;
        } else if (opts.with_g || opts.require_non_perfect_power_ratio) {
            Polynomial g = draw_monic();
            if (opts.require_square_free && !is_square_free(g)) continue;
            if (opts.require_non_perfect_power_ratio) {
                RationalFn ratio(f, g);
                if (ratio.is_constant()) continue;
                if (perfect_power_decompose(ratio, *field).exponent != 1) continue;
            }
            inst.g = g;
        }
        return inst;
    }
    throw std::domain_error("instance constraints unsatisfiable within the attempt budget");
}

}  // namespace powerprobe
