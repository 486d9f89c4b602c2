#pragma once

// Concrete syntax for license files and queries.
//
//   xrml-fragment v1
//   declare principals Alice, Bob;
//   declare properties Smart, Attractive;
//   trusted grant Perm({Amy}, issue, <Said({Alice}, Smart({Bob})) -> Attractive({Bob})>);
//   license ({Alice}) grants Smart({Bob});
//   license ({Amy}) grants forall x_p . Said({Alice}, Smart(x_p)) -> Attractive(x_p);
//   # comments run to end of line
//
// Query files hold one goal expression terminated by `?`.
// Principal terms are brace sets; a set with several components is the union
// of its components.  Grant literals in resource position sit inside <...>.
// The negation extension writes !Said / !Pr / !Perm.

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrml/ast.hpp"

namespace xrml {

struct SourceSpan {
    std::string file;
    int line = 1;
    int column = 1;
};

class ParseError : public std::runtime_error {
   public:
    ParseError(std::string msg, SourceSpan span)
        : std::runtime_error(span.file + ":" + std::to_string(span.line) + ":" +
                             std::to_string(span.column) + ": " + msg),
          span_(std::move(span)) {}
    const SourceSpan& span() const { return span_; }

   private:
    SourceSpan span_;
};

struct Workspace {
    Declarations decls;
    std::vector<License> licenses;
    std::vector<TrustedGrant> trusted;

    Query make_query(ConcPtr goal) const {
        Query q;
        q.goal = std::move(goal);
        q.licenses = licenses;
        q.trusted = trusted;
        return q;
    }
};

namespace parser_detail {

enum class Tok {
    Ident, LBrace, RBrace, LParen, RParen, LAngle, RAngle,
    Comma, Semi, Dot, Question, Bang, Colon, AndOp, Arrow, End,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
   public:
    Lexer(const std::string& src, std::string file) : src_(src), file_(std::move(file)) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                continue;
            }
            if (c == '\n') {
                ++pos_;
                ++line_;
                col_ = 1;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            int line = line_, col = col_;
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                        src_[pos_] == '_' || src_[pos_] == '\'')) {
                    id += src_[pos_];
                    advance();
                }
                out.push_back({Tok::Ident, std::move(id), line, col});
                continue;
            }
            switch (c) {
                case '{': push(out, Tok::LBrace, "{", line, col); break;
                case '}': push(out, Tok::RBrace, "}", line, col); break;
                case '(': push(out, Tok::LParen, "(", line, col); break;
                case ')': push(out, Tok::RParen, ")", line, col); break;
                case '<': push(out, Tok::LAngle, "<", line, col); break;
                case '>': push(out, Tok::RAngle, ">", line, col); break;
                case ',': push(out, Tok::Comma, ",", line, col); break;
                case ';': push(out, Tok::Semi, ";", line, col); break;
                case '.': push(out, Tok::Dot, ".", line, col); break;
                case '?': push(out, Tok::Question, "?", line, col); break;
                case '!': push(out, Tok::Bang, "!", line, col); break;
                case ':': push(out, Tok::Colon, ":", line, col); break;
                case '/':
                    if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\\') {
                        advance();
                        push(out, Tok::AndOp, "/\\", line, col);
                    } else {
                        throw ParseError("stray '/'", {file_, line, col});
                    }
                    break;
                case '-':
                    if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                        advance();
                        push(out, Tok::Arrow, "->", line, col);
                    } else {
                        throw ParseError("stray '-'", {file_, line, col});
                    }
                    break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'",
                                     {file_, line, col});
            }
        }
        out.push_back({Tok::End, "", line_, col_});
        return out;
    }

   private:
    void advance() {
        ++pos_;
        ++col_;
    }
    void push(std::vector<Token>& out, Tok k, std::string t, int line, int col) {
        advance();
        out.push_back({k, std::move(t), line, col});
    }

    const std::string& src_;
    std::string file_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

inline bool reserved(const std::string& id) {
    static const char* words[] = {"declare",  "principals", "properties", "trusted",
                                  "grant",    "grants",     "license",    "forall",
                                  "true",     "Said",       "Perm",       "issue",
                                  "principal", "resource"};
    for (const char* w : words)
        if (id == w) return true;
    return false;
}

class Parser {
   public:
    Parser(std::vector<Token> toks, std::string file, const Declarations* decls,
           bool negation)
        : toks_(std::move(toks)), file_(std::move(file)), negation_(negation) {
        if (decls) decls_ = *decls;
        decls_.negation = negation;
    }

    Workspace parse_license_file() {
        Workspace ws;
        int seq = 0;
        while (at(Tok::Ident, "declare")) parse_declaration();
        decls_.normalize();
        while (!at_end()) {
            if (at(Tok::Ident, "declare"))
                throw error("declarations must precede grant and license statements");
            if (at(Tok::Ident, "trusted")) {
                int line = peek().line;
                eat_ident("trusted");
                eat_ident("grant");
                GrantPtr g = parse_grant(true);
                expect(Tok::Semi, "';'");
                ws.trusted.push_back({g, seq++, line});
            } else if (at(Tok::Ident, "license")) {
                int line = peek().line;
                eat_ident("license");
                expect(Tok::LParen, "'('");
                SourceSpan prin_span = span();
                PrincipalTerm issuer = parse_principal();
                expect(Tok::RParen, "')'");
                if (!issuer.ground())
                    throw ParseError("license issuer must be variable-free", prin_span);
                if (issuer.names.empty())
                    throw ParseError("license issuer must be nonempty", prin_span);
                eat_ident("grants");
                GrantPtr g = parse_grant(true);
                expect(Tok::Semi, "';'");
                // Set issuers abbreviate one license per member.
                for (const auto& n : issuer.names)
                    ws.licenses.push_back({PrincipalTerm::singleton(n), g, seq, line});
                ++seq;
            } else {
                throw error("expected 'trusted grant' or 'license' statement");
            }
        }
        ws.decls = decls_;
        return ws;
    }

    ConcPtr parse_query_goal() {
        ConcPtr goal = parse_conclusion();
        expect(Tok::Question, "'?'");
        if (!at_end()) throw error("trailing input after query");
        if (!goal->closed_) throw error_at(goal_span_, "query goal is not closed");
        return goal;
    }

   private:
    // --- token plumbing ---
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool at_end() const { return peek().kind == Tok::End; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at(Tok k, const char* text) const { return peek().kind == k && peek().text == text; }
    SourceSpan span() const { return {file_, peek().line, peek().col}; }
    ParseError error(const std::string& msg) const { return ParseError(msg, span()); }
    ParseError error_at(SourceSpan s, const std::string& msg) const {
        return ParseError(msg, std::move(s));
    }
    void expect(Tok k, const char* what) {
        if (!at(k)) throw error(std::string("expected ") + what);
        next();
    }
    void eat_ident(const char* word) {
        if (!at(Tok::Ident, word)) throw error(std::string("expected '") + word + "'");
        next();
    }
    std::string expect_name(const char* what) {
        if (!at(Tok::Ident)) throw error(std::string("expected ") + what);
        return next().text;
    }

    // --- declarations ---
    void parse_declaration() {
        eat_ident("declare");
        bool prins;
        if (at(Tok::Ident, "principals"))
            prins = true;
        else if (at(Tok::Ident, "properties"))
            prins = false;
        else
            throw error("expected 'principals' or 'properties'");
        next();
        while (true) {
            SourceSpan s = span();
            std::string n = expect_name("name");
            if (reserved(n)) throw error_at(s, "'" + n + "' is a reserved word");
            (prins ? decls_.principals : decls_.properties).push_back(n);
            if (at(Tok::Comma))
                next();
            else
                break;
        }
        expect(Tok::Semi, "';'");
    }

    // --- binder scope ---
    const Variable* lookup(const std::string& name) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == name) return &*it;
        return nullptr;
    }

    // --- grammar ---
    GrantPtr parse_grant(bool top_level) {
        if (++depth_ > 200) throw error("grant nesting too deep");
        std::vector<Variable> binders;
        while (at(Tok::Ident, "forall")) {
            next();
            SourceSpan s = span();
            std::string name = expect_name("variable name");
            if (reserved(name)) throw error_at(s, "'" + name + "' is a reserved word");
            Sort sort;
            if (at(Tok::Colon)) {
                next();
                if (at(Tok::Ident, "principal"))
                    sort = Sort::Principal;
                else if (at(Tok::Ident, "resource"))
                    sort = Sort::Resource;
                else
                    throw error("expected 'principal' or 'resource'");
                next();
            } else if (name.rfind("x_p", 0) == 0) {
                sort = Sort::Principal;
            } else if (name.rfind("x_r", 0) == 0) {
                sort = Sort::Resource;
            } else {
                throw error_at(s, "cannot infer sort of '" + name +
                                      "' (use an x_p/x_r prefix or ': principal' / ': resource')");
            }
            if (lookup(name)) throw error_at(s, "variable '" + name + "' shadows an outer binder");
            if (decls_.has_principal(name) || decls_.has_property(name))
                throw error_at(s, "variable '" + name + "' collides with a declared name");
            binders.push_back({name, sort});
            scope_.push_back({name, sort});
            expect(Tok::Dot, "'.'");
        }
        SourceSpan body_span = span();
        CondPtr cond = make_true();
        ConcPtr conc;
        // The body is either `cond -> conc` or a bare conclusion.  A leading
        // `!` starts a condition only for `!Said`; `!Pr` / `!Perm` open a
        // negated-conclusion grant.
        bool neg_said = at(Tok::Bang) && pos_ + 1 < toks_.size() &&
                        toks_[pos_ + 1].kind == Tok::Ident && toks_[pos_ + 1].text == "Said";
        if (at(Tok::Ident, "true") || neg_said || looks_like_said()) {
            cond = parse_condition();
            expect(Tok::Arrow, "'->'");
            conc = parse_conclusion();
        } else {
            conc = parse_conclusion();
            if (at(Tok::Arrow))
                throw error("conclusion cannot be the antecedent of '->'");
        }
        scope_.resize(scope_.size() - binders.size());
        --depth_;
        try {
            return make_grant(std::move(binders), std::move(cond), std::move(conc));
        } catch (const std::logic_error& e) {
            throw error_at(body_span, e.what());
        }
        (void)top_level;
    }

    bool looks_like_said() const {
        return at(Tok::Ident, "Said");
    }

    CondPtr parse_condition() {
        std::vector<CondPtr> parts;
        parts.push_back(parse_condition_atom());
        while (at(Tok::AndOp)) {
            next();
            parts.push_back(parse_condition_atom());
        }
        return make_conjunction(parts);
    }

    CondPtr parse_condition_atom() {
        if (at(Tok::Ident, "true")) {
            next();
            return make_true();
        }
        bool neg = false;
        if (at(Tok::Bang)) {
            SourceSpan s = span();
            next();
            if (!at(Tok::Ident, "Said"))
                return parse_negated_conclusion_condition(s);
            neg = true;
            if (!negation_)
                throw error_at(s, "negated Said requires the negation extension");
        }
        if (!at(Tok::Ident, "Said")) throw error("expected condition");
        next();
        expect(Tok::LParen, "'('");
        PrincipalTerm p = parse_principal();
        expect(Tok::Comma, "','");
        ConcPtr e = parse_conclusion();
        expect(Tok::RParen, "')'");
        return make_said(std::move(p), std::move(e), neg);
    }

    CondPtr parse_negated_conclusion_condition(SourceSpan s) {
        // Conditions are true / Said / conjunctions only; a negated conclusion
        // here is a sort error regardless of the extension flag.
        throw error_at(s, "expected '!Said' (conditions cannot be conclusions)");
    }

    ConcPtr parse_conclusion() {
        goal_span_ = span();
        bool neg = false;
        if (at(Tok::Bang)) {
            SourceSpan s = span();
            next();
            if (!negation_)
                throw error_at(s, "negated conclusions require the negation extension");
            neg = true;
        }
        if (at(Tok::Ident, "Perm")) {
            next();
            expect(Tok::LParen, "'('");
            PrincipalTerm p = parse_principal();
            expect(Tok::Comma, "','");
            eat_ident("issue");
            expect(Tok::Comma, "','");
            Resource r = parse_resource();
            expect(Tok::RParen, "')'");
            return make_permission(std::move(p), std::move(r), neg);
        }
        SourceSpan s = span();
        std::string prop = expect_name("property name");
        if (reserved(prop)) throw error_at(s, "expected property name, found '" + prop + "'");
        if (!decls_.has_property(prop))
            throw error_at(s, "undeclared property '" + prop + "'");
        expect(Tok::LParen, "'('");
        PrincipalTerm p = parse_principal();
        expect(Tok::RParen, "')'");
        return make_property(std::move(prop), std::move(p), neg);
    }

    PrincipalTerm parse_principal() {
        std::vector<std::string> names, vars;
        if (!at(Tok::LBrace)) {
            // bare name sugar: Smart(Bob) abbreviates Smart({Bob})
            parse_principal_element(names, vars);
            return PrincipalTerm::make(std::move(names), std::move(vars));
        }
        next();
        if (!at(Tok::RBrace)) {
            while (true) {
                parse_principal_element(names, vars);
                if (at(Tok::Comma))
                    next();
                else
                    break;
            }
        }
        expect(Tok::RBrace, "'}'");
        return PrincipalTerm::make(std::move(names), std::move(vars));
    }

    void parse_principal_element(std::vector<std::string>& names, std::vector<std::string>& vars) {
        SourceSpan s = span();
        std::string n = expect_name("principal or variable");
        if (const Variable* v = lookup(n)) {
            if (v->sort != Sort::Principal)
                throw error_at(s, "resource variable '" + n + "' in principal position");
            vars.push_back(n);
        } else if (decls_.has_principal(n)) {
            names.push_back(n);
        } else if (n.rfind("x_", 0) == 0) {
            throw error_at(s, "free variable '" + n + "' (not bound by any forall)");
        } else {
            throw error_at(s, "undeclared principal '" + n + "'");
        }
    }

    Resource parse_resource() {
        if (at(Tok::LAngle)) {
            next();
            GrantPtr g = parse_grant(false);
            expect(Tok::RAngle, "'>'");
            return Resource::make_grant(std::move(g));
        }
        SourceSpan s = span();
        std::string n = expect_name("resource variable or '<'");
        const Variable* v = lookup(n);
        if (!v) throw error_at(s, "unbound resource variable '" + n + "'");
        if (v->sort != Sort::Resource)
            throw error_at(s, "principal variable '" + n + "' in resource position");
        return Resource::make_var(n);
    }

    std::vector<Token> toks_;
    std::string file_;
    Declarations decls_;
    bool negation_;
    std::vector<Variable> scope_;
    size_t pos_ = 0;
    int depth_ = 0;
    SourceSpan goal_span_;
};

// Strips and validates the `xrml-fragment v1` header line, returning the rest.
inline std::string consume_header(const std::string& text, const std::string& file) {
    size_t pos = 0;
    int line = 1;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string raw = text.substr(pos, eol - pos);
        std::string trimmed;
        for (char c : raw) {
            if (c == '#') break;
            trimmed += c;
        }
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.pop_back();
        size_t start = 0;
        while (start < trimmed.size() && std::isspace(static_cast<unsigned char>(trimmed[start])))
            ++start;
        trimmed = trimmed.substr(start);
        if (!trimmed.empty()) {
            if (trimmed != "xrml-fragment v1")
                throw ParseError("expected 'xrml-fragment v1' header", {file, line, 1});
            std::string rest(eol == text.size() ? 0 : text.size() - eol, ' ');
            // Preserve line numbers by blanking the consumed prefix.
            std::string out = text;
            for (size_t i = 0; i < eol && i < out.size(); ++i)
                if (out[i] != '\n') out[i] = ' ';
            return out;
        }
        pos = eol == text.size() ? eol : eol + 1;
        ++line;
    }
    throw ParseError("expected 'xrml-fragment v1' header", {file, line, 1});
}

}  // namespace parser_detail

// Parses a license file: declarations, trusted grants and licenses.
// Licenses with set issuers are expanded into singleton-issuer licenses.
inline Workspace parse_license_file(const std::string& text, bool negation = false,
                                    const std::string& file = "<input>") {
    std::string body = parser_detail::consume_header(text, file);
    parser_detail::Lexer lex(body, file);
    parser_detail::Parser p(lex.run(), file, nullptr, negation);
    return p.parse_license_file();
}

// Parses a query file: one closed goal conclusion terminated by `?`.
inline ConcPtr parse_query(const std::string& text, const Declarations& decls,
                           const std::string& file = "<query>") {
    std::string body = parser_detail::consume_header(text, file);
    parser_detail::Lexer lex(body, file);
    parser_detail::Parser p(lex.run(), file, &decls, decls.negation);
    return p.parse_query_goal();
}

}  // namespace xrml
