#include "fabd/lattice.hpp"

#include <algorithm>
#include <bit>

#include "fabd/error.hpp"

namespace fabd {

std::uint32_t poly_op_arity(PolyOp op) {
    switch (op) {
        case PolyOp::Const0:
        case PolyOp::Const1: return 0;
        case PolyOp::Not: return 1;
        case PolyOp::And2:
        case PolyOp::Or2: return 2;
        case PolyOp::Maj3:
        case PolyOp::Xor3: return 3;
    }
    return 0;
}

namespace {

TupleMask apply_op(PolyOp op, TupleMask a, TupleMask b, TupleMask c, TupleMask full) {
    switch (op) {
        case PolyOp::Const0: return 0;
        case PolyOp::Const1: return full;
        case PolyOp::Not: return ~a & full;
        case PolyOp::And2: return a & b;
        case PolyOp::Or2: return a | b;
        case PolyOp::Maj3: return (a & b) | (a & c) | (b & c);
        case PolyOp::Xor3: return a ^ b ^ c;
    }
    return 0;
}

// Arity threshold above which clause / xor relations use closed-form
// closure answers; tuple-power enumeration below it.
constexpr std::uint32_t kEnumArity = 11;

bool closed_wide(const Relation& r, PolyOp op) {
    if (r.kind() == RelKind::Clause) {
        switch (op) {
            case PolyOp::Const0: return r.negative_count() >= 1;
            case PolyOp::Const1: return r.positive_count() >= 1;
            case PolyOp::Not: return false;
            case PolyOp::And2: return r.positive_count() <= 1;
            case PolyOp::Or2: return r.negative_count() <= 1;
            case PolyOp::Maj3: return false; // arity above 2 here
            case PolyOp::Xor3: return false;
        }
    }
    if (r.kind() == RelKind::Xor) {
        switch (op) {
            case PolyOp::Const0: return !r.rhs();
            case PolyOp::Const1: return ((r.arity() & 1) != 0) == r.rhs();
            case PolyOp::Not: return (r.arity() & 1) == 0;
            case PolyOp::And2: return false; // arity above 2 here
            case PolyOp::Or2: return false;
            case PolyOp::Maj3: return false;
            case PolyOp::Xor3: return true;
        }
    }
    fail(ErrorCode::Internal, "closure shortcut for unsupported relation");
}

bool closed_one(const Relation& r, PolyOp op) {
    if (r.arity() > kEnumArity &&
        (r.kind() == RelKind::Clause || r.kind() == RelKind::Xor))
        return closed_wide(r, op);

    const auto& ts = r.tuples();
    const TupleMask full = static_cast<TupleMask>((std::uint64_t{1} << r.arity()) - 1);
    switch (poly_op_arity(op)) {
        case 0:
            return r.contains(apply_op(op, 0, 0, 0, full));
        case 1:
            for (TupleMask a : ts)
                if (!r.contains(apply_op(op, a, 0, 0, full))) return false;
            return true;
        case 2:
            for (TupleMask a : ts)
                for (TupleMask b : ts)
                    if (!r.contains(apply_op(op, a, b, 0, full))) return false;
            return true;
        default:
            for (TupleMask a : ts)
                for (TupleMask b : ts)
                    for (TupleMask c : ts)
                        if (!r.contains(apply_op(op, a, b, c, full))) return false;
            return true;
    }
}

bool is_implication(const Relation& r) {
    return r.kind() == RelKind::Clause && r.arity() == 2 && r.positive_count() == 1;
}

} // namespace

bool closed_under(std::span<const RelationPtr> rels, PolyOp op) {
    return std::all_of(rels.begin(), rels.end(),
                       [&](const RelationPtr& r) { return closed_one(*r, op); });
}

LanguageProfile profile(std::span<const RelationPtr> rels) {
    LanguageProfile p;
    p.zero_valid = closed_under(rels, PolyOp::Const0);
    p.one_valid = closed_under(rels, PolyOp::Const1);
    p.complementive = closed_under(rels, PolyOp::Not);
    p.horn = closed_under(rels, PolyOp::And2);
    p.dualhorn = closed_under(rels, PolyOp::Or2);
    p.bijunctive = closed_under(rels, PolyOp::Maj3);
    p.affine = closed_under(rels, PolyOp::Xor3);

    for (const RelationPtr& rp : rels) {
        const Relation& r = *rp;
        p.max_arity = std::max(p.max_arity, r.arity());
        const bool unit = r.kind() == RelKind::Unit;
        const bool eq = r.kind() == RelKind::Equality;
        const bool clause = r.kind() == RelKind::Clause;
        const bool xr = r.kind() == RelKind::Xor;
        if (unit && r.rhs()) p.has_pos_unit = true;
        if (unit && !r.rhs()) p.has_neg_unit = true;
        if (xr) {
            p.has_xor = true;
            if (r.arity() % 2 != 0) p.xor_all_even = false;
        }
        if (!is_implication(r)) p.all_implication = false;
        if (!(unit || eq || (clause && r.positive_count() == 0))) p.en_form = false;
        if (!(unit || eq || (clause && r.negative_count() == 0))) p.ep_form = false;
        if (!(unit || eq || (xr && r.arity() <= 2))) p.affine2_form = false;
        if (!(unit || clause)) p.clausal = false;
        if (!(unit || eq || xr)) p.xor_forms_only = false;
    }
    return p;
}

std::vector<RelationPtr> kb_relations(const Formula& f) {
    std::vector<RelationPtr> out;
    for (const Atom& a : f.atoms()) {
        if (a.rel->always_true()) continue;
        bool seen = std::any_of(out.begin(), out.end(), [&](const RelationPtr& r) {
            return r == a.rel || r->same_structure(*a.rel);
        });
        if (!seen) out.push_back(a.rel);
    }
    return out;
}

LanguageProfile profile(const Formula& f) {
    auto rels = kb_relations(f);
    return profile(rels);
}

const char* problem_name(Problem p) {
    switch (p) {
        case Problem::Abd: return "ABD";
        case Problem::IsFacet: return "ISFACET";
        case Problem::Relevance: return "RELEVANCE";
        case Problem::DivAbd: return "DIVABD";
    }
    return "?";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::P: return "P";
        case Verdict::NpComplete: return "NP_COMPLETE";
        case Verdict::Sigma2pComplete: return "SIGMA2P_COMPLETE";
        case Verdict::Open: return "OPEN";
        case Verdict::Unknown: return "UNKNOWN";
    }
    return "?";
}

namespace {

void add_equality_assumption(const LanguageProfile& p, std::vector<std::string>& just) {
    // Hardness transfers assume equality is expressible, which holds for
    // every language that is not essentially negative / positive.
    if (!p.en_form && !p.ep_form) just.push_back(just::kEqExpress);
}

ComplexityVerdict facet_like_verdict(const LanguageProfile& p, Problem problem) {
    ComplexityVerdict out{problem, Verdict::Unknown, {}};
    const bool relevance = problem == Problem::Relevance;
    auto done = [&](Verdict v, std::vector<std::string> just) {
        out.verdict = v;
        out.justification = std::move(just);
        if (relevance) out.justification.push_back(just::kRelevanceDrop);
        return out;
    };

    if (p.en_form) return done(Verdict::P, {just::kEnFacet});
    if (p.all_implication) return done(Verdict::P, {just::kImpFacet});
    if (p.affine2_form) return done(Verdict::P, {just::kAffine2Facet});
    if (p.dualhorn) return done(Verdict::P, {just::kDualHornFacet, just::kUnitElim});

    // The even-equation languages (optionally with positive units) are the
    // open cells; note that the source results waver between calling them
    // even- and odd-length, we key on even.
    if (p.affine && p.one_valid && p.xor_forms_only && !p.has_neg_unit && p.xor_all_even &&
        p.has_xor)
        return done(Verdict::Open, {just::kOpenEvenAffine, just::kEvenOddNote});

    if (p.horn) {
        std::vector<std::string> just{just::kHornNpHard, just::kNpMembership};
        add_equality_assumption(p, just);
        return done(Verdict::NpComplete, std::move(just));
    }
    if (p.bijunctive) {
        std::vector<std::string> just{just::kAbdToFacet, just::kNpMembership};
        add_equality_assumption(p, just);
        return done(Verdict::NpComplete, std::move(just));
    }

    if ((p.zero_valid && p.one_valid && p.complementive) || !p.schaefer()) {
        std::vector<std::string> just{just::kSigma2p, just::kNegUnitSim, just::kPosUnitElim};
        add_equality_assumption(p, just);
        return done(Verdict::Sigma2pComplete, std::move(just));
    }
    return out;
}

ComplexityVerdict div_verdict(const LanguageProfile& p) {
    ComplexityVerdict out{Problem::DivAbd, Verdict::Unknown, {}};
    if (p.affine2_form) return {Problem::DivAbd, Verdict::P, {just::kAffine2Div}};
    if (p.ep_form) return {Problem::DivAbd, Verdict::P, {just::kEpDiv}};
    if (p.all_implication)
        return {Problem::DivAbd, Verdict::NpComplete, {just::kPos2SatDiv, just::kNpMembership}};
    if ((p.zero_valid && p.one_valid && p.complementive) || !p.schaefer()) {
        std::vector<std::string> just{just::kSigma2pDiv, just::kNegUnitSim};
        add_equality_assumption(p, just);
        return {Problem::DivAbd, Verdict::Sigma2pComplete, std::move(just)};
    }
    return out;
}

ComplexityVerdict abd_verdict(const LanguageProfile& p) {
    if (p.dualhorn) return {Problem::Abd, Verdict::P, {just::kDualHornAbd}};
    if (p.horn) {
        std::vector<std::string> just{just::kHornAbd};
        add_equality_assumption(p, just);
        return {Problem::Abd, Verdict::NpComplete, std::move(just)};
    }
    if ((p.zero_valid && p.one_valid && p.complementive) || !p.schaefer()) {
        std::vector<std::string> just{just::kSigma2p};
        add_equality_assumption(p, just);
        return {Problem::Abd, Verdict::Sigma2pComplete, std::move(just)};
    }
    return {Problem::Abd, Verdict::Unknown, {}};
}

} // namespace

ComplexityVerdict verdict(const LanguageProfile& p, Problem problem) {
    switch (problem) {
        case Problem::IsFacet:
        case Problem::Relevance:
            return facet_like_verdict(p, problem);
        case Problem::DivAbd:
            return div_verdict(p);
        case Problem::Abd:
            return abd_verdict(p);
    }
    fail(ErrorCode::Internal, "unknown problem");
}

} // namespace fabd
