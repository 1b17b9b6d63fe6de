#include "fabd/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "fabd/error.hpp"

namespace fabd {

bool AbductionInstance::is_hyp(Var v) const {
    return std::binary_search(hyps.begin(), hyps.end(), v);
}

bool AbductionInstance::is_man(Var v) const {
    return std::binary_search(mans.begin(), mans.end(), v);
}

FacetInstance ParsedInstance::facet() const {
    if (!query) fail(ErrorCode::Usage, "instance has no query variable");
    return FacetInstance{base, *query};
}

DivInstance ParsedInstance::div() const {
    if (!k) fail(ErrorCode::Usage, "instance has no distance bound k");
    return DivInstance{base, *k};
}

std::vector<std::string> var_names(const AbductionInstance& inst, const std::vector<Var>& vs) {
    std::vector<std::string> out;
    out.reserve(vs.size());
    for (Var v : vs) out.push_back(inst.vars.name(v));
    return out;
}

namespace {

struct Token {
    std::string text;
    int column;
};

struct Line {
    int number;
    std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos
                                                                              : end - pos);
        ++line_no;
        Line line{line_no, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] == '#') break;
            if (std::isspace(static_cast<unsigned char>(raw[i]))) { ++i; continue; }
            std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) &&
                   raw[i] != '#')
                ++i;
            line.tokens.push_back(Token{std::string(raw.substr(start, i - start)),
                                        static_cast<int>(start) + 1});
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return lines;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

class InstanceParser {
public:
    explicit InstanceParser(std::string_view text) : lines_(tokenize(text)) {}

    ParsedInstance parse_instance() {
        for (const Line& line : lines_) {
            if (line.tokens[0].text == "def")
                skip_def(line);
            else
                handle_line(line);
        }
        finalize();
        return std::move(result_);
    }

    DefinitionSet parse_definitions() {
        for (std::size_t li = 0; li < lines_.size(); ++li) {
            const Line& line = lines_[li];
            if (line.tokens[0].text == "rel") {
                auto [name, rel] = parse_rel(line);
                defs_.declared[name] = rel;
            } else if (line.tokens[0].text == "def") {
                li = parse_def(li);
            }
            // other instance lines are permitted and ignored
        }
        return std::move(defs_);
    }

private:
    [[noreturn]] void err(const Line& line, int col, const std::string& msg) {
        fail(ErrorCode::ParseError, msg, line.number, col);
    }

    Var var_of(const Line& line, const Token& tok) {
        if (!valid_name(tok.text)) err(line, tok.column, "invalid name '" + tok.text + "'");
        return result_.base.vars.intern(tok.text);
    }

    void handle_line(const Line& line) {
        const std::string& head = line.tokens[0].text;
        if (head == "clause") parse_clause(line);
        else if (head == "xor") parse_xor(line);
        else if (head == "eq") parse_eq(line);
        else if (head == "rel") {
            auto [name, rel] = parse_rel(line);
            if (tables_.count(name))
                err(line, line.tokens[1].column, "relation '" + name + "' redeclared");
            tables_[name] = rel;
            table_order_.push_back(name);
        }
        else if (head == "app") parse_app(line);
        else if (head == "hyp") parse_var_list(line, hyp_names_);
        else if (head == "man") parse_var_list(line, man_names_);
        else if (head == "query") parse_query(line);
        else if (head == "k") parse_k(line);
        else err(line, line.tokens[0].column, "unknown directive '" + head + "'");
    }

    void parse_clause(const Line& line) {
        if (line.tokens.size() < 2) err(line, line.tokens[0].column, "clause needs literals");
        std::vector<bool> signs;
        std::vector<Var> args;
        for (std::size_t i = 1; i < line.tokens.size(); ++i) {
            std::string t = line.tokens[i].text;
            bool positive = true;
            if (!t.empty() && t[0] == '-') { positive = false; t = t.substr(1); }
            if (!valid_name(t)) err(line, line.tokens[i].column, "invalid literal '" + t + "'");
            signs.push_back(positive);
            args.push_back(result_.base.vars.intern(t));
        }
        if (signs.size() > kMaxArity)
            err(line, line.tokens[0].column, "clause wider than " + std::to_string(kMaxArity));
        result_.base.kb.add(Relation::clause(std::move(signs)), std::move(args));
    }

    void parse_xor(const Line& line) {
        std::vector<Var> args;
        std::size_t i = 1;
        for (; i < line.tokens.size() && line.tokens[i].text != "="; ++i)
            args.push_back(var_of(line, line.tokens[i]));
        if (args.empty()) err(line, line.tokens[0].column, "xor needs variables");
        if (i + 1 >= line.tokens.size() || line.tokens[i].text != "=")
            err(line, line.tokens.back().column, "xor needs '= 0|1'");
        const std::string& rhs = line.tokens[i + 1].text;
        if (rhs != "0" && rhs != "1") err(line, line.tokens[i + 1].column, "xor rhs must be 0 or 1");
        if (i + 2 != line.tokens.size())
            err(line, line.tokens[i + 2].column, "trailing tokens after xor rhs");
        if (args.size() > kMaxArity)
            err(line, line.tokens[0].column, "xor wider than " + std::to_string(kMaxArity));
        result_.base.kb.add(Relation::xor_eq(static_cast<std::uint32_t>(args.size()), rhs == "1"),
                            std::move(args));
    }

    void parse_eq(const Line& line) {
        if (line.tokens.size() != 3) err(line, line.tokens[0].column, "eq needs two variables");
        std::vector<Var> args{var_of(line, line.tokens[1]), var_of(line, line.tokens[2])};
        result_.base.kb.add(Relation::equality(), std::move(args));
    }

    std::pair<std::string, RelationPtr> parse_rel(const Line& line) {
        if (line.tokens.size() < 4) err(line, line.tokens[0].column, "rel needs name, arity, ':'");
        const std::string& name = line.tokens[1].text;
        if (!valid_name(name)) err(line, line.tokens[1].column, "invalid relation name");
        int arity = 0;
        try { arity = std::stoi(line.tokens[2].text); } catch (...) { arity = -1; }
        if (arity < 0 || arity > static_cast<int>(kMaxArity))
            err(line, line.tokens[2].column, "bad arity");
        if (line.tokens[3].text != ":") err(line, line.tokens[3].column, "expected ':'");
        std::vector<TupleMask> tuples;
        for (std::size_t i = 4; i < line.tokens.size(); ++i) {
            const std::string& bits = line.tokens[i].text;
            if (static_cast<int>(bits.size()) != arity)
                err(line, line.tokens[i].column, "bitstring length differs from arity");
            TupleMask t = 0;
            for (std::size_t j = 0; j < bits.size(); ++j) {
                if (bits[j] == '1') t |= TupleMask{1} << j;
                else if (bits[j] != '0') err(line, line.tokens[i].column, "bitstring must be 0/1");
            }
            tuples.push_back(t);
        }
        return {name, Relation::table(name, static_cast<std::uint32_t>(arity), std::move(tuples))};
    }

    void parse_app(const Line& line) {
        if (line.tokens.size() < 2) err(line, line.tokens[0].column, "app needs a relation name");
        const std::string& name = line.tokens[1].text;
        auto it = tables_.find(name);
        if (it == tables_.end())
            err(line, line.tokens[1].column, "relation '" + name + "' not declared");
        std::vector<Var> args;
        for (std::size_t i = 2; i < line.tokens.size(); ++i)
            args.push_back(var_of(line, line.tokens[i]));
        if (args.size() != it->second->arity())
            err(line, line.tokens[0].column, "app arity mismatch for '" + name + "'");
        result_.base.kb.add(it->second, std::move(args));
    }

    void parse_var_list(const Line& line, std::vector<Token>& out) {
        if (line.tokens.size() < 2) err(line, line.tokens[0].column, "empty variable list");
        for (std::size_t i = 1; i < line.tokens.size(); ++i) out.push_back(line.tokens[i]);
    }

    void parse_query(const Line& line) {
        if (line.tokens.size() != 2) err(line, line.tokens[0].column, "query needs one variable");
        query_tok_ = line.tokens[1];
        query_line_ = line.number;
    }

    void parse_k(const Line& line) {
        if (line.tokens.size() != 2) err(line, line.tokens[0].column, "k needs one number");
        try {
            long v = std::stol(line.tokens[1].text);
            if (v < 0) throw std::invalid_argument("negative");
            result_.k = static_cast<std::uint32_t>(v);
        } catch (...) {
            err(line, line.tokens[1].column, "k must be a non-negative integer");
        }
    }

    void skip_def(const Line& line) {
        fail(ErrorCode::ParseError, "def blocks belong in definition files", line.number,
             line.tokens[0].column);
    }

    // def Name(a b ; w) { ... }   returns index of the closing line
    std::size_t parse_def(std::size_t li) {
        const Line& line = lines_[li];
        // Re-assemble the header from its tokens; punctuation may or may not
        // be glued to names.
        std::string header;
        for (std::size_t i = 1; i < line.tokens.size(); ++i) header += line.tokens[i].text + " ";
        auto op = header.find('(');
        auto semi = header.find(';');
        auto cp = header.find(')');
        auto brace = header.find('{');
        if (op == std::string::npos || cp == std::string::npos || brace == std::string::npos ||
            cp < op || brace < cp)
            fail(ErrorCode::ParseError, "malformed def header", line.number, 1);
        EfppDefinition def;
        def.target = trim(header.substr(0, op));
        if (!valid_name(def.target))
            fail(ErrorCode::ParseError, "invalid def target name", line.number, 1);
        std::string frees = semi != std::string::npos && semi < cp
                                ? header.substr(op + 1, semi - op - 1)
                                : header.substr(op + 1, cp - op - 1);
        std::string exists = semi != std::string::npos && semi < cp
                                 ? header.substr(semi + 1, cp - semi - 1)
                                 : "";
        def.free_names = split_names(frees, line.number);
        def.exist_names = split_names(exists, line.number);
        if (def.free_names.empty())
            fail(ErrorCode::ParseError, "def needs at least one free variable", line.number, 1);

        std::map<std::string, std::uint32_t> locals;
        std::uint32_t idx = 0;
        for (const auto& n : def.free_names) locals[n] = idx++;
        for (const auto& n : def.exist_names) {
            if (locals.count(n))
                fail(ErrorCode::ParseError, "duplicate def variable '" + n + "'", line.number, 1);
            locals[n] = idx++;
        }

        // Body: following lines until a lone '}'.
        std::size_t bi = li + 1;
        for (; bi < lines_.size(); ++bi) {
            const Line& body = lines_[bi];
            if (body.tokens[0].text == "}") break;
            def.body.push_back(parse_body_atom(body, locals));
        }
        if (bi == lines_.size()) fail(ErrorCode::ParseError, "unterminated def block", line.number, 1);
        defs_.add(std::move(def));
        return bi;
    }

    EfppDefinition::BodyAtom parse_body_atom(const Line& line,
                                             const std::map<std::string, std::uint32_t>& locals) {
        const std::string& head = line.tokens[0].text;
        auto local = [&](const Token& tok, bool allow_neg) -> std::pair<std::uint32_t, bool> {
            std::string t = tok.text;
            bool positive = true;
            if (allow_neg && !t.empty() && t[0] == '-') { positive = false; t = t.substr(1); }
            auto it = locals.find(t);
            if (it == locals.end())
                fail(ErrorCode::ParseError, "unknown def variable '" + t + "'", line.number,
                     tok.column);
            return {it->second, positive};
        };
        EfppDefinition::BodyAtom atom;
        if (head == "clause") {
            std::vector<bool> signs;
            for (std::size_t i = 1; i < line.tokens.size(); ++i) {
                auto [v, pos] = local(line.tokens[i], true);
                signs.push_back(pos);
                atom.locals.push_back(v);
            }
            atom.rel = Relation::clause(std::move(signs));
        } else if (head == "xor") {
            std::size_t i = 1;
            for (; i < line.tokens.size() && line.tokens[i].text != "="; ++i)
                atom.locals.push_back(local(line.tokens[i], false).first);
            if (i + 1 >= line.tokens.size())
                fail(ErrorCode::ParseError, "xor needs '= 0|1'", line.number, 1);
            atom.rel = Relation::xor_eq(static_cast<std::uint32_t>(atom.locals.size()),
                                        line.tokens[i + 1].text == "1");
        } else if (head == "eq") {
            if (line.tokens.size() != 3)
                fail(ErrorCode::ParseError, "eq needs two variables", line.number, 1);
            atom.locals.push_back(local(line.tokens[1], false).first);
            atom.locals.push_back(local(line.tokens[2], false).first);
            atom.rel = Relation::equality();
        } else if (head == "app") {
            if (line.tokens.size() < 2)
                fail(ErrorCode::ParseError, "app needs a relation name", line.number, 1);
            auto it = defs_.declared.find(line.tokens[1].text);
            if (it == defs_.declared.end())
                fail(ErrorCode::ParseError, "relation '" + line.tokens[1].text + "' not declared",
                     line.number, line.tokens[1].column);
            for (std::size_t i = 2; i < line.tokens.size(); ++i)
                atom.locals.push_back(local(line.tokens[i], false).first);
            atom.rel = it->second;
        } else {
            fail(ErrorCode::ParseError, "unknown def body directive '" + head + "'", line.number,
                 line.tokens[0].column);
        }
        if (atom.locals.size() != atom.rel->arity())
            fail(ErrorCode::ParseError, "def body arity mismatch", line.number, 1);
        return atom;
    }

    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        if (b == std::string::npos) return "";
        return s.substr(b, e - b + 1);
    }

    std::vector<std::string> split_names(const std::string& s, int line_no) {
        std::vector<std::string> out;
        std::istringstream in(s);
        std::string name;
        while (in >> name) {
            if (!valid_name(name))
                fail(ErrorCode::ParseError, "invalid def variable '" + name + "'", line_no, 1);
            out.push_back(name);
        }
        return out;
    }

    void finalize() {
        auto kb_vars = result_.base.kb.vars();
        auto in_kb = [&](Var v) { return std::binary_search(kb_vars.begin(), kb_vars.end(), v); };

        auto resolve = [&](const std::vector<Token>& toks, const char* role) {
            std::vector<Var> out;
            for (const Token& tok : toks) {
                auto v = result_.base.vars.find(tok.text);
                if (!v || !in_kb(*v))
                    fail(ErrorCode::ScopeError,
                         std::string(role) + " variable '" + tok.text + "' not in var(KB)");
                out.push_back(*v);
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        };
        result_.base.hyps = resolve(hyp_names_, "hypothesis");
        result_.base.mans = resolve(man_names_, "manifestation");

        if (query_tok_) {
            auto v = result_.base.vars.find(query_tok_->text);
            if (!v || !result_.base.is_hyp(*v))
                fail(ErrorCode::ScopeError,
                     "query variable '" + query_tok_->text + "' not in H", query_line_,
                     query_tok_->column);
            result_.query = *v;
        }
    }

    std::vector<Line> lines_;
    ParsedInstance result_;
    DefinitionSet defs_;
    std::map<std::string, RelationPtr> tables_;
    std::vector<std::string> table_order_;
    std::vector<Token> hyp_names_;
    std::vector<Token> man_names_;
    std::optional<Token> query_tok_;
    int query_line_ = 0;
};

} // namespace

ParsedInstance parse_instance(std::string_view text) {
    return InstanceParser(text).parse_instance();
}

DefinitionSet parse_definitions(std::string_view text) {
    return InstanceParser(text).parse_definitions();
}

namespace {

void render_atom(std::ostringstream& out, const AbductionInstance& inst, const Atom& atom,
                 std::map<std::string, const Relation*>& tables,
                 std::vector<std::string>& table_lines) {
    const Relation& r = *atom.rel;
    auto name_of = [&](Var v) { return inst.vars.name(v); };
    switch (r.kind()) {
        case RelKind::Clause: {
            out << "clause";
            for (std::size_t i = 0; i < atom.args.size(); ++i)
                out << ' ' << (r.signs()[i] ? "" : "-") << name_of(atom.args[i]);
            out << '\n';
            return;
        }
        case RelKind::Unit:
            out << "clause " << (r.rhs() ? "" : "-") << name_of(atom.args[0]) << '\n';
            return;
        case RelKind::Xor: {
            out << "xor";
            for (Var v : atom.args) out << ' ' << name_of(v);
            out << " = " << (r.rhs() ? 1 : 0) << '\n';
            return;
        }
        case RelKind::Equality:
            out << "eq " << name_of(atom.args[0]) << ' ' << name_of(atom.args[1]) << '\n';
            return;
        case RelKind::Table: {
            auto it = tables.find(r.name());
            if (it == tables.end()) {
                tables.emplace(r.name(), &r);
                std::ostringstream decl;
                decl << "rel " << r.name() << ' ' << r.arity() << " :";
                for (TupleMask t : r.tuples()) {
                    decl << ' ';
                    for (std::uint32_t j = 0; j < r.arity(); ++j)
                        decl << (((t >> j) & 1) ? '1' : '0');
                }
                table_lines.push_back(decl.str());
            } else if (!it->second->same_structure(r)) {
                fail(ErrorCode::Internal, "conflicting table relations named " + r.name());
            }
            out << "app " << r.name();
            for (Var v : atom.args) out << ' ' << name_of(v);
            out << '\n';
            return;
        }
    }
}

std::string render_impl(const AbductionInstance& inst, const std::optional<Var>& query,
                        const std::optional<std::uint32_t>& k) {
    std::ostringstream body;
    std::map<std::string, const Relation*> tables;
    std::vector<std::string> table_lines;

    // Variables mentioned in H / M / query whose atoms were all simplified
    // away get a vacuous eq line so the rendered file still scopes them.
    auto kb_vars = inst.kb.vars();
    auto touch = [&](Var v) {
        if (!std::binary_search(kb_vars.begin(), kb_vars.end(), v))
            body << "eq " << inst.vars.name(v) << ' ' << inst.vars.name(v) << '\n';
    };
    {
        std::vector<Var> extras;
        for (Var v : inst.hyps) extras.push_back(v);
        for (Var v : inst.mans) extras.push_back(v);
        if (query) extras.push_back(*query);
        std::sort(extras.begin(), extras.end());
        extras.erase(std::unique(extras.begin(), extras.end()), extras.end());
        for (Var v : extras) touch(v);
    }

    for (const Atom& atom : inst.kb.atoms()) render_atom(body, inst, atom, tables, table_lines);

    std::ostringstream out;
    for (const std::string& line : table_lines) out << line << '\n';
    out << body.str();
    if (!inst.hyps.empty()) {
        out << "hyp";
        for (Var v : inst.hyps) out << ' ' << inst.vars.name(v);
        out << '\n';
    }
    if (!inst.mans.empty()) {
        out << "man";
        for (Var v : inst.mans) out << ' ' << inst.vars.name(v);
        out << '\n';
    }
    if (query) out << "query " << inst.vars.name(*query) << '\n';
    if (k) out << "k " << *k << '\n';
    return out.str();
}

} // namespace

std::string render(const ParsedInstance& inst) {
    return render_impl(inst.base, inst.query, inst.k);
}

std::string render(const AbductionInstance& inst) {
    return render_impl(inst, std::nullopt, std::nullopt);
}

} // namespace fabd
