#include "fabd/engines.hpp"

#include <algorithm>
#include <bit>
#include <deque>

#include "fabd/error.hpp"

namespace fabd {

namespace {

// Per-atom propagation state. Clauses and xors get counter/parity tracking;
// tables are narrowed tuple-wise (generalized arc consistency).
struct AtomState {
    enum class Tag { Clause, Xor, Equality, Table, Done } tag = Tag::Done;
    const Atom* atom = nullptr;
    // Clause: number of unfalsified literals; Xor: unassigned count and
    // accumulated parity; Table: live tuples.
    std::uint32_t remaining = 0;
    bool parity = false;
    bool satisfied = false;
    std::vector<TupleMask> live;
};

class Propagator {
public:
    Propagator(const Formula& f, std::size_t n_vars)
        : formula_(f), values_(n_vars, -1), occ_(n_vars) {
        states_.resize(f.atoms().size());
        for (std::size_t i = 0; i < f.atoms().size(); ++i) init_atom(i);
    }

    bool push(Var v, bool b) {
        if (values_[v] >= 0) return values_[v] == (b ? 1 : 0);
        values_[v] = b ? 1 : 0;
        trail_.push_back(v);
        queue_.push_back(v);
        return true;
    }

    // Runs to fixpoint; false on conflict.
    bool run() {
        // Initial forcing from units and degenerate atoms happens in
        // init_atom; afterwards standard queue processing.
        while (!queue_.empty()) {
            Var v = queue_.front();
            queue_.pop_front();
            for (std::size_t idx : occ_[v])
                if (!update_atom(idx)) return false;
        }
        return true;
    }

    bool conflict() const { return conflict_; }
    void mark_conflict() { conflict_ = true; }

    PropagationResult finish() {
        PropagationResult out;
        out.status = conflict_ ? PropStatus::Conflict : PropStatus::Ok;
        out.forced = values_;
        out.forced_vars = trail_;
        if (conflict_) return out;
        for (std::size_t i = 0; i < states_.size(); ++i) build_residual_atom(i, out.residual);
        return out;
    }

private:
    void init_atom(std::size_t idx) {
        const Atom& a = formula_.atoms()[idx];
        AtomState& st = states_[idx];
        st.atom = &a;
        if (a.rel->always_true()) { st.tag = AtomState::Tag::Done; return; }
        if (a.rel->always_false()) { conflict_ = true; st.tag = AtomState::Tag::Done; return; }
        switch (a.rel->kind()) {
            case RelKind::Unit:
                st.tag = AtomState::Tag::Done;
                if (!push(a.args[0], a.rel->rhs())) conflict_ = true;
                return;
            case RelKind::Clause:
                st.tag = AtomState::Tag::Clause;
                st.remaining = a.rel->arity();
                break;
            case RelKind::Xor:
                st.tag = AtomState::Tag::Xor;
                st.remaining = a.rel->arity();
                st.parity = a.rel->rhs();
                break;
            case RelKind::Equality:
                st.tag = AtomState::Tag::Equality;
                st.remaining = 2;
                break;
            case RelKind::Table:
                st.tag = AtomState::Tag::Table;
                st.live = a.rel->tuples();
                st.remaining = a.rel->arity();
                break;
        }
        for (Var v : a.args) occ_[v].push_back(idx);
        // An initially forcing table (all tuples agreeing on a coordinate)
        // must propagate before any assignment arrives.
        if (st.tag == AtomState::Tag::Table && !table_force(idx)) conflict_ = true;
    }

    bool update_atom(std::size_t idx) {
        AtomState& st = states_[idx];
        if (st.satisfied || st.tag == AtomState::Tag::Done) return true;
        const Atom& a = *st.atom;
        switch (st.tag) {
            case AtomState::Tag::Clause: {
                st.remaining = 0;
                int open = -1;
                for (std::size_t i = 0; i < a.args.size(); ++i) {
                    std::int8_t val = values_[a.args[i]];
                    bool sign = a.rel->signs()[i];
                    if (val < 0) { ++st.remaining; open = static_cast<int>(i); continue; }
                    if ((val == 1) == sign) { st.satisfied = true; return true; }
                }
                if (st.remaining == 0) return false;
                if (st.remaining == 1) return push(a.args[open], a.rel->signs()[open]);
                return true;
            }
            case AtomState::Tag::Xor: {
                std::uint32_t unassigned = 0;
                int open = -1;
                // parity ends up as rhs xor (parity of assigned ones); the
                // open variable must take exactly that value.
                bool parity = a.rel->rhs();
                for (std::size_t i = 0; i < a.args.size(); ++i) {
                    std::int8_t val = values_[a.args[i]];
                    if (val < 0) { ++unassigned; open = static_cast<int>(i); continue; }
                    if (val == 1) parity = !parity;
                }
                st.remaining = unassigned;
                if (unassigned == 0) {
                    if (parity) return false;
                    st.satisfied = true;
                    return true;
                }
                if (unassigned == 1) return push(a.args[open], parity);
                return true;
            }
            case AtomState::Tag::Equality: {
                std::int8_t v0 = values_[a.args[0]];
                std::int8_t v1 = values_[a.args[1]];
                if (v0 >= 0 && v1 >= 0) return v0 == v1;
                if (v0 >= 0) return push(a.args[1], v0 == 1);
                if (v1 >= 0) return push(a.args[0], v1 == 1);
                return true;
            }
            case AtomState::Tag::Table:
                return table_force(idx);
            default:
                return true;
        }
    }

    bool table_force(std::size_t idx) {
        AtomState& st = states_[idx];
        const Atom& a = *st.atom;
        // Narrow live tuples against the current assignment.
        std::erase_if(st.live, [&](TupleMask t) {
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                std::int8_t val = values_[a.args[i]];
                if (val >= 0 && (((t >> i) & 1) != 0) != (val == 1)) return true;
            }
            return false;
        });
        if (st.live.empty()) return false;
        std::uint32_t unassigned = 0;
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (values_[a.args[i]] >= 0) continue;
            ++unassigned;
            bool first = ((st.live[0] >> i) & 1) != 0;
            bool agree = std::all_of(st.live.begin(), st.live.end(), [&](TupleMask t) {
                return (((t >> i) & 1) != 0) == first;
            });
            if (agree && !push(a.args[i], first)) return false;
        }
        if (st.live.size() == (std::size_t{1} << unassigned_count(a)) ) st.satisfied = true;
        return true;
    }

    std::uint32_t unassigned_count(const Atom& a) const {
        std::uint32_t n = 0;
        for (Var v : a.args) n += values_[v] < 0 ? 1 : 0;
        return n;
    }

    void build_residual_atom(std::size_t idx, Formula& out) {
        AtomState& st = states_[idx];
        if (st.satisfied || st.tag == AtomState::Tag::Done) return;
        const Atom& a = *st.atom;
        std::vector<Var> open_args;
        for (Var v : a.args)
            if (values_[v] < 0) open_args.push_back(v);
        // Fully assigned without a conflict means satisfied.
        if (open_args.empty()) return;
        if (open_args.size() == a.args.size()) {
            if (!a.rel->always_true()) out.add(a.rel, a.args);
            return;
        }
        switch (st.tag) {
            case AtomState::Tag::Clause: {
                std::vector<bool> signs;
                for (std::size_t i = 0; i < a.args.size(); ++i)
                    if (values_[a.args[i]] < 0) signs.push_back(a.rel->signs()[i]);
                if (signs.empty()) fail(ErrorCode::Internal, "residual clause lost its literals");
                out.add(Relation::clause(std::move(signs)), std::move(open_args));
                return;
            }
            case AtomState::Tag::Xor: {
                bool parity = a.rel->rhs();
                for (std::size_t i = 0; i < a.args.size(); ++i)
                    if (values_[a.args[i]] == 1) parity = !parity;
                out.add(Relation::xor_eq(static_cast<std::uint32_t>(open_args.size()), parity),
                        std::move(open_args));
                return;
            }
            case AtomState::Tag::Equality:
                // A half-assigned equality cannot survive the fixpoint.
                fail(ErrorCode::Internal, "residual equality with an assigned side");
            case AtomState::Tag::Table: {
                // Project live tuples onto open coordinates.
                std::vector<TupleMask> proj;
                for (TupleMask t : st.live) {
                    TupleMask p = 0;
                    std::uint32_t j = 0;
                    for (std::size_t i = 0; i < a.args.size(); ++i) {
                        if (values_[a.args[i]] >= 0) continue;
                        if ((t >> i) & 1) p |= TupleMask{1} << j;
                        ++j;
                    }
                    proj.push_back(p);
                }
                auto rel = Relation::table(a.rel->name() + "_r",
                                           static_cast<std::uint32_t>(open_args.size()),
                                           std::move(proj));
                if (!rel->always_true()) out.add(rel, std::move(open_args));
                return;
            }
            default:
                return;
        }
    }

    const Formula& formula_;
    Assignment values_;
    std::vector<std::vector<std::size_t>> occ_;
    std::vector<AtomState> states_;
    std::deque<Var> queue_;
    std::vector<Var> trail_;
    bool conflict_ = false;
};

} // namespace

PropagationResult unit_propagate_assuming(const Formula& f, std::size_t n_vars,
                                          std::span<const std::pair<Var, bool>> assumptions) {
    Propagator prop(f, n_vars);
    if (!prop.conflict()) {
        for (auto [v, b] : assumptions) {
            if (!prop.push(v, b)) { prop.mark_conflict(); break; }
        }
    }
    if (!prop.conflict() && !prop.run()) prop.mark_conflict();
    return prop.finish();
}

PropagationResult unit_propagate(const Formula& f, std::size_t n_vars) {
    return unit_propagate_assuming(f, n_vars, {});
}

bool formula_in_fragment(const Formula& f, EngineHint hint) {
    auto atom_ok = [&](const Atom& a) {
        const Relation& r = *a.rel;
        if (r.always_true() || r.always_false()) return true;
        switch (hint) {
            case EngineHint::Horn:
                return r.kind() == RelKind::Unit || r.kind() == RelKind::Equality ||
                       (r.kind() == RelKind::Clause && r.positive_count() <= 1);
            case EngineHint::DualHorn:
                return r.kind() == RelKind::Unit || r.kind() == RelKind::Equality ||
                       (r.kind() == RelKind::Clause && r.negative_count() <= 1);
            case EngineHint::TwoSat:
                return r.kind() == RelKind::Unit || r.kind() == RelKind::Equality ||
                       (r.kind() == RelKind::Clause && r.arity() <= 2) ||
                       (r.kind() == RelKind::Xor && r.arity() <= 2);
            case EngineHint::Xor:
                return r.kind() == RelKind::Unit || r.kind() == RelKind::Equality ||
                       r.kind() == RelKind::Xor;
            default:
                return true;
        }
    };
    return std::all_of(f.atoms().begin(), f.atoms().end(), atom_ok);
}

namespace {

Assignment complete_with(const PropagationResult& prop, const Formula& f, bool fill) {
    Assignment model = prop.forced;
    for (Var v : f.vars())
        if (model[v] < 0) model[v] = fill ? 1 : 0;
    return model;
}

void check_model(const Formula& f, const Assignment& model, const char* engine) {
    if (!evaluate(f, model))
        fail(ErrorCode::Internal, std::string("engine ") + engine + " produced a non-model");
}

SatResult sat_unit_filled(const Formula& f, std::size_t n_vars, bool fill, const char* name) {
    auto prop = unit_propagate(f, n_vars);
    if (prop.status == PropStatus::Conflict) return {false, {}};
    Assignment model = complete_with(prop, f, fill);
    check_model(f, model, name);
    return {true, std::move(model)};
}

// 2-SAT: literal nodes 2v (true) and 2v+1 (false), implication edges from
// every falsifying pair of each binary residual atom, then Tarjan SCC.
SatResult sat_twosat(const Formula& f, std::size_t n_vars) {
    auto prop = unit_propagate(f, n_vars);
    if (prop.status == PropStatus::Conflict) return {false, {}};
    const Formula& g = prop.residual;
    auto gvars = g.vars();
    std::vector<std::uint32_t> node_of(n_vars, UINT32_MAX);
    for (std::size_t i = 0; i < gvars.size(); ++i) node_of[gvars[i]] = static_cast<std::uint32_t>(i);
    const std::size_t n_nodes = 2 * gvars.size();
    std::vector<std::vector<std::uint32_t>> adj(n_nodes);
    auto lit = [&](Var v, bool val) { return 2 * node_of[v] + (val ? 0 : 1); };

    for (const Atom& a : g.atoms()) {
        if (a.rel->always_true()) continue;
        if (a.args.size() != 2) fail(ErrorCode::Internal, "twosat residual atom not binary");
        for (TupleMask t = 0; t < 4; ++t) {
            if (a.rel->contains(t)) continue;
            bool va = (t & 1) != 0, vb = (t & 2) != 0;
            // forbid (a=va AND b=vb)
            adj[lit(a.args[0], va)].push_back(lit(a.args[1], !vb));
            adj[lit(a.args[1], vb)].push_back(lit(a.args[0], !va));
        }
    }

    // Iterative Tarjan; components are numbered in completion order, which
    // is reverse topological on the condensation.
    std::vector<std::int32_t> comp(n_nodes, -1), low(n_nodes, 0), num(n_nodes, -1);
    std::vector<std::uint32_t> stack;
    std::vector<std::uint8_t> on_stack(n_nodes, 0);
    std::int32_t counter = 0, comp_count = 0;
    struct Frame { std::uint32_t node; std::size_t edge; };
    for (std::uint32_t root = 0; root < n_nodes; ++root) {
        if (num[root] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        num[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& fr = frames.back();
            if (fr.edge < adj[fr.node].size()) {
                std::uint32_t next = adj[fr.node][fr.edge++];
                if (num[next] < 0) {
                    num[next] = low[next] = counter++;
                    stack.push_back(next);
                    on_stack[next] = 1;
                    frames.push_back({next, 0});
                } else if (on_stack[next]) {
                    low[fr.node] = std::min(low[fr.node], num[next]);
                }
            } else {
                std::uint32_t done = fr.node;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[done]);
                if (low[done] == num[done]) {
                    while (true) {
                        std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = comp_count;
                        if (w == done) break;
                    }
                    ++comp_count;
                }
            }
        }
    }

    Assignment model = prop.forced;
    for (Var v : gvars) {
        if (comp[lit(v, true)] == comp[lit(v, false)]) return {false, {}};
        model[v] = comp[lit(v, true)] < comp[lit(v, false)] ? 1 : 0;
    }
    for (Var v : f.vars())
        if (model[v] < 0) model[v] = 0;
    check_model(f, model, "twosat");
    return {true, std::move(model)};
}

// Gaussian elimination over GF(2) on the propagated residual.
SatResult sat_xor(const Formula& f, std::size_t n_vars) {
    auto prop = unit_propagate(f, n_vars);
    if (prop.status == PropStatus::Conflict) return {false, {}};
    const Formula& g = prop.residual;
    auto gvars = g.vars();
    std::vector<std::uint32_t> col_of(n_vars, UINT32_MAX);
    for (std::size_t i = 0; i < gvars.size(); ++i) col_of[gvars[i]] = static_cast<std::uint32_t>(i);
    const std::size_t cols = gvars.size();
    const std::size_t words = (cols + 63) / 64;

    struct Row {
        std::vector<std::uint64_t> bits;
        bool rhs;
    };
    std::vector<Row> rows;
    for (const Atom& a : g.atoms()) {
        if (a.rel->always_true()) continue;
        Row row{std::vector<std::uint64_t>(words, 0), false};
        if (a.rel->kind() == RelKind::Xor) row.rhs = a.rel->rhs();
        else if (a.rel->kind() == RelKind::Equality) row.rhs = false;
        else fail(ErrorCode::Internal, "xor residual atom not affine");
        for (Var v : a.args) {
            std::uint32_t c = col_of[v];
            row.bits[c / 64] ^= std::uint64_t{1} << (c % 64);
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::int32_t> pivot_row(cols, -1);
    for (auto& row : rows) {
        std::int32_t col = -1;
        for (std::size_t attempt = 0; attempt < cols + 1; ++attempt) {
            col = -1;
            for (std::size_t w = 0; w < words && col < 0; ++w)
                if (row.bits[w]) col = static_cast<std::int32_t>(w * 64 + std::countr_zero(row.bits[w]));
            if (col < 0) break;
            if (pivot_row[static_cast<std::size_t>(col)] < 0) break;
            auto& p = rows[static_cast<std::size_t>(pivot_row[static_cast<std::size_t>(col)])];
            for (std::size_t w = 0; w < words; ++w) row.bits[w] ^= p.bits[w];
            row.rhs = row.rhs != p.rhs;
        }
        if (col < 0) {
            if (row.rhs) return {false, {}};
            continue;
        }
        pivot_row[static_cast<std::size_t>(col)] =
            static_cast<std::int32_t>(&row - rows.data());
    }

    // Back-substitute with free columns at 0, highest pivot column first.
    Assignment model = prop.forced;
    std::vector<std::int8_t> colval(cols, 0);
    for (std::size_t ci = cols; ci-- > 0;) {
        std::int32_t ri = pivot_row[ci];
        if (ri < 0) { colval[ci] = 0; continue; }
        const Row& row = rows[static_cast<std::size_t>(ri)];
        bool acc = row.rhs;
        for (std::size_t cj = ci + 1; cj < cols; ++cj) {
            if ((row.bits[cj / 64] >> (cj % 64)) & 1)
                acc = acc != (colval[cj] == 1);
        }
        colval[ci] = acc ? 1 : 0;
    }
    for (std::size_t i = 0; i < cols; ++i) model[gvars[i]] = colval[i];
    for (Var v : f.vars())
        if (model[v] < 0) model[v] = 0;
    check_model(f, model, "xor");
    return {true, std::move(model)};
}

SatResult sat_brute(const Formula& f, std::size_t n_vars, const EngineConfig& cfg) {
    auto vars = f.vars();
    const std::size_t m = vars.size();
    if (m >= 63) fail(ErrorCode::BudgetExceeded, "too many variables for brute force");
    Assignment model = make_assignment(n_vars);
    std::uint64_t used = 0;
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t c = 0; c < total; ++c) {
        if (++used > cfg.model_budget)
            fail(ErrorCode::BudgetExceeded,
                 "brute-force model budget of " + std::to_string(cfg.model_budget) + " exceeded");
        // Lexicographic over (vars[0], vars[1], ...): first variable is the
        // most significant counter bit.
        for (std::size_t i = 0; i < m; ++i)
            model[vars[i]] = static_cast<std::int8_t>((c >> (m - 1 - i)) & 1);
        if (evaluate(f, model)) return {true, model};
    }
    return {false, {}};
}

} // namespace

SatResult sat(const Formula& f, std::size_t n_vars, EngineHint hint, const EngineConfig& cfg) {
    for (const Atom& a : f.atoms())
        if (a.rel->always_false()) return {false, {}};

    if (hint == EngineHint::Auto) {
        if (formula_in_fragment(f, EngineHint::Horn)) hint = EngineHint::Horn;
        else if (formula_in_fragment(f, EngineHint::DualHorn)) hint = EngineHint::DualHorn;
        else if (formula_in_fragment(f, EngineHint::TwoSat)) hint = EngineHint::TwoSat;
        else if (formula_in_fragment(f, EngineHint::Xor)) hint = EngineHint::Xor;
        else hint = EngineHint::Brute;
    } else if (hint != EngineHint::Brute && !formula_in_fragment(f, hint)) {
        fail(ErrorCode::WrongFragment, "formula outside the hinted fragment");
    }

    switch (hint) {
        case EngineHint::Horn: return sat_unit_filled(f, n_vars, false, "horn");
        case EngineHint::DualHorn: return sat_unit_filled(f, n_vars, true, "dualhorn");
        case EngineHint::TwoSat: return sat_twosat(f, n_vars);
        case EngineHint::Xor: return sat_xor(f, n_vars);
        default: return sat_brute(f, n_vars, cfg);
    }
}

bool entails(const Formula& f, std::size_t n_vars, Var m, EngineHint hint,
             const EngineConfig& cfg) {
    Formula g = f;
    g.add(Relation::unit(false), {m});
    return !sat(g, n_vars, hint, cfg).satisfiable;
}

bool verify_explanation(const AbductionInstance& inst, std::span<const Var> explanation,
                        const EngineConfig& cfg) {
    for (Var v : explanation)
        if (!inst.is_hyp(v))
            fail(ErrorCode::NotSubsetOfH,
                 "explanation candidate mentions non-hypothesis '" + inst.vars.name(v) + "'");
    Formula g = inst.kb;
    for (Var v : explanation) g.add(Relation::unit(true), {v});
    if (!sat(g, inst.vars.size(), EngineHint::Auto, cfg).satisfiable) return false;
    for (Var m : inst.mans)
        if (!entails(g, inst.vars.size(), m, EngineHint::Auto, cfg)) return false;
    return true;
}

} // namespace fabd
