#include "fabd/generate.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "fabd/error.hpp"
#include "fabd/parser.hpp"

namespace fabd {

const char* gen_fragment_name(GenFragment f) {
    switch (f) {
        case GenFragment::Imp: return "imp";
        case GenFragment::DualHorn: return "dualhorn";
        case GenFragment::Horn: return "horn";
        case GenFragment::Affine2: return "affine2";
        case GenFragment::En: return "en";
        case GenFragment::Ep: return "ep";
        case GenFragment::Pos2Cnf: return "pos2cnf";
    }
    return "?";
}

GenFragment gen_fragment_from(const std::string& name) {
    if (name == "imp") return GenFragment::Imp;
    if (name == "dualhorn") return GenFragment::DualHorn;
    if (name == "horn") return GenFragment::Horn;
    if (name == "affine2") return GenFragment::Affine2;
    if (name == "en") return GenFragment::En;
    if (name == "ep") return GenFragment::Ep;
    if (name == "pos2cnf") return GenFragment::Pos2Cnf;
    fail(ErrorCode::Usage, "unknown fragment '" + name + "'");
}

namespace {

// Bounded sampling on top of the raw engine keeps the byte stream
// reproducible across standard libraries.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(engine() % n); }
    bool chance(double p) { return (engine() >> 11) * 0x1.0p-53 < p; }
};

struct Emitter {
    std::ostringstream out;
    std::vector<std::uint8_t> used;
    std::vector<std::uint8_t> sigma;
    Rng rng;
    bool adversary_ok;
    double adversarial;

    Emitter(const GenConfig& cfg)
        : used(cfg.n_vars, 0), sigma(cfg.n_vars, 0), rng(cfg.seed),
          adversarial(cfg.adversarial) {
        for (auto& b : sigma) b = rng.below(2) ? 1 : 0;
    }

    std::string name(std::uint32_t v) { return "v" + std::to_string(v + 1); }

    std::uint32_t pick(std::uint32_t n_vars) {
        std::uint32_t v = rng.below(n_vars);
        used[v] = 1;
        return v;
    }

    // k distinct variables
    std::vector<std::uint32_t> pick_distinct(std::uint32_t n_vars, std::uint32_t k) {
        std::vector<std::uint32_t> vs;
        while (vs.size() < k) {
            std::uint32_t v = rng.below(n_vars);
            if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
        }
        for (auto v : vs) used[v] = 1;
        return vs;
    }

    void clause_line(const std::vector<std::uint32_t>& vs, const std::vector<bool>& signs) {
        out << "clause";
        for (std::size_t i = 0; i < vs.size(); ++i)
            out << ' ' << (signs[i] ? "" : "-") << name(vs[i]);
        out << '\n';
    }

    bool clause_sat(const std::vector<std::uint32_t>& vs, const std::vector<bool>& signs) {
        for (std::size_t i = 0; i < vs.size(); ++i)
            if ((sigma[vs[i]] == 1) == signs[i]) return true;
        return false;
    }

    // Emits a clause, resampling signs-compatible variables so the hidden
    // model keeps satisfying it unless this atom is adversarial.
    void clause_guided(std::uint32_t n_vars, std::vector<bool> signs) {
        bool guided = !rng.chance(adversarial);
        for (int attempt = 0; attempt < 30; ++attempt) {
            auto vs = pick_distinct(n_vars, static_cast<std::uint32_t>(signs.size()));
            if (!guided || clause_sat(vs, signs)) {
                clause_line(vs, signs);
                return;
            }
        }
        auto vs = pick_distinct(n_vars, static_cast<std::uint32_t>(signs.size()));
        clause_line(vs, signs);
    }
};

} // namespace

std::string generate(const GenConfig& cfg) {
    if (cfg.n_vars < 2) fail(ErrorCode::Usage, "generator needs at least two variables");
    if (cfg.n_atoms < 1) fail(ErrorCode::Usage, "generator needs at least one atom");

    Emitter em(cfg);
    Rng& rng = em.rng;
    const std::uint32_t n = cfg.n_vars;

    for (std::uint32_t i = 0; i < cfg.n_atoms; ++i) {
        // The first atom is always binary so at least two variables occur.
        const bool first = i == 0;
        switch (cfg.fragment) {
            case GenFragment::Imp: {
                em.clause_guided(n, {false, true});
                break;
            }
            case GenFragment::DualHorn: {
                std::uint32_t roll = first ? 0 : rng.below(20);
                if (roll < 8) em.clause_guided(n, {false, true});
                else if (roll < 12) em.clause_guided(n, {true, true});
                else if (roll < 15) em.clause_guided(n, {true, true, true});
                else if (roll < 18) em.clause_guided(n, {false, true, true});
                else {
                    std::uint32_t v = em.pick(n);
                    bool positive = rng.chance(em.adversarial) ? rng.below(2) != 0
                                                               : em.sigma[v] == 1;
                    em.out << "clause " << (positive ? "" : "-") << em.name(v) << '\n';
                }
                break;
            }
            case GenFragment::Horn: {
                std::uint32_t roll = first ? 0 : rng.below(20);
                if (roll < 8) em.clause_guided(n, {false, true});
                else if (roll < 12) em.clause_guided(n, {false, false});
                else if (roll < 15) em.clause_guided(n, {false, false, true});
                else if (roll < 18) em.clause_guided(n, {false, false, false});
                else {
                    std::uint32_t v = em.pick(n);
                    bool positive = rng.chance(em.adversarial) ? rng.below(2) != 0
                                                               : em.sigma[v] == 1;
                    em.out << "clause " << (positive ? "" : "-") << em.name(v) << '\n';
                }
                break;
            }
            case GenFragment::Affine2: {
                std::uint32_t roll = first ? 0 : rng.below(10);
                if (roll < 8) {
                    bool rhs_bit = rng.below(2) != 0;
                    bool guided = !rng.chance(em.adversarial);
                    std::vector<std::uint32_t> vs;
                    for (int attempt = 0; attempt < 30; ++attempt) {
                        vs = em.pick_distinct(n, 2);
                        if (!guided ||
                            ((em.sigma[vs[0]] ^ em.sigma[vs[1]]) != 0) == rhs_bit)
                            break;
                    }
                    if (rhs_bit) em.out << "xor " << em.name(vs[0]) << ' ' << em.name(vs[1])
                                        << " = 1\n";
                    else em.out << "eq " << em.name(vs[0]) << ' ' << em.name(vs[1]) << '\n';
                } else {
                    std::uint32_t v = em.pick(n);
                    bool positive = rng.chance(em.adversarial) ? rng.below(2) != 0
                                                               : em.sigma[v] == 1;
                    em.out << "clause " << (positive ? "" : "-") << em.name(v) << '\n';
                }
                break;
            }
            case GenFragment::En:
            case GenFragment::Ep: {
                const bool en = cfg.fragment == GenFragment::En;
                std::uint32_t roll = first ? 0 : rng.below(20);
                if (roll < 8) em.clause_guided(n, en ? std::vector<bool>{false, false}
                                                     : std::vector<bool>{true, true});
                else if (roll < 11) em.clause_guided(n, en ? std::vector<bool>{false, false, false}
                                                           : std::vector<bool>{true, true, true});
                else if (roll < 16) {
                    bool guided = !rng.chance(em.adversarial);
                    std::vector<std::uint32_t> vs;
                    for (int attempt = 0; attempt < 30; ++attempt) {
                        vs = em.pick_distinct(n, 2);
                        if (!guided || em.sigma[vs[0]] == em.sigma[vs[1]]) break;
                    }
                    em.out << "eq " << em.name(vs[0]) << ' ' << em.name(vs[1]) << '\n';
                } else {
                    std::uint32_t v = em.pick(n);
                    bool positive = rng.chance(em.adversarial) ? rng.below(2) != 0
                                                               : em.sigma[v] == 1;
                    em.out << "clause " << (positive ? "" : "-") << em.name(v) << '\n';
                }
                break;
            }
            case GenFragment::Pos2Cnf: {
                em.clause_guided(n, {true, true});
                break;
            }
        }
    }

    // Disjoint non-empty H and M over the used variables, shuffled.
    std::vector<std::uint32_t> pool;
    for (std::uint32_t v = 0; v < n; ++v)
        if (em.used[v]) pool.push_back(v);
    if (pool.size() < 2) fail(ErrorCode::Internal, "generator used fewer than two variables");
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.below(static_cast<std::uint32_t>(i))]);

    std::size_t n_hyp = std::max<std::size_t>(1, pool.size() / 2);
    if (n_hyp >= pool.size()) n_hyp = pool.size() - 1;
    std::size_t n_man = std::max<std::size_t>(1, (pool.size() - n_hyp) / 2);

    std::vector<std::uint32_t> hyp(pool.begin(), pool.begin() + n_hyp);
    std::vector<std::uint32_t> man(pool.begin() + n_hyp, pool.begin() + n_hyp + n_man);
    std::sort(hyp.begin(), hyp.end());
    std::sort(man.begin(), man.end());

    em.out << "hyp";
    for (auto v : hyp) em.out << ' ' << em.name(v);
    em.out << "\nman";
    for (auto v : man) em.out << ' ' << em.name(v);
    em.out << '\n';
    return em.out.str();
}

ParsedInstance generate_instance(const GenConfig& cfg) {
    return parse_instance(generate(cfg));
}

} // namespace fabd
