#include <acpstep/frontend/parser.hpp>

#include <cctype>
#include <charconv>
#include <limits>

namespace acpstep {

void TermAst::collect_variables(std::set<std::string>& out) const {
    if (kind == Kind::Variable) {
        out.insert(name);
    }
    for (const TermAst& c : children) {
        c.collect_variables(out);
    }
}

std::string TermAst::str() const {
    switch (kind) {
    case Kind::Number: return std::to_string(number);
    case Kind::Symbol:
    case Kind::Variable: return name;
    case Kind::Anonymous: return "_";
    case Kind::Unary: return "-" + children[0].str();
    case Kind::Binary: return "(" + children[0].str() + op + children[1].str() + ")";
    case Kind::Range: return children[0].str() + ".." + children[1].str();
    case Kind::Pool: {
        std::string out;
        for (std::size_t i = 0; i < children.size(); ++i) {
            out += (i > 0 ? ";" : "") + children[i].str();
        }
        return out;
    }
    }
    return {};
}

void AtomAst::collect_variables(std::set<std::string>& out) const {
    for (const TermAst& t : args) {
        t.collect_variables(out);
    }
}

std::string AtomAst::str() const {
    std::string out = predicate;
    if (!args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < args.size(); ++i) {
            out += (i > 0 ? "," : "") + args[i].str();
        }
        out += ')';
    }
    return out;
}

void LiteralAst::collect_variables(std::set<std::string>& out) const {
    switch (kind) {
    case Kind::Atom:
        atom.collect_variables(out);
        break;
    case Kind::Compare:
        lhs.collect_variables(out);
        rhs.collect_variables(out);
        break;
    case Kind::Aggregate:
        if (aggregate.lower) {
            aggregate.lower->collect_variables(out);
        }
        if (aggregate.upper) {
            aggregate.upper->collect_variables(out);
        }
        for (const AggregateElementAst& e : aggregate.elements) {
            e.atom.collect_variables(out);
            if (e.weight) {
                e.weight->collect_variables(out);
            }
            for (const LiteralAst& c : e.conditions) {
                c.collect_variables(out);
            }
        }
        break;
    case Kind::Explicit:
        for (const AtomAst& a : explicit_atom.domain) {
            a.collect_variables(out);
        }
        for (const auto& s : explicit_atom.satisfiers) {
            for (const AtomAst& a : s) {
                a.collect_variables(out);
            }
        }
        break;
    }
}

namespace {

enum class Tok {
    Ident, Variable, Anonymous, Number, Not, Count, Sum, Inf, Sup,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Semicolon, Dot, DotDot, Colon, If, Bar,
    Eq, Ne, Lt, Le, Gt, Ge,
    Plus, Minus, Star, Slash, Backslash,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t number = 0;
    SourcePosition begin;
    SourcePosition end;
    std::size_t offset = 0;
    std::size_t end_offset = 0;
};

std::string describe(const Token& t) {
    return t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'";
}

class Lexer {
public:
    Lexer(std::string_view text, const std::string& file) : text_(text), file_(file) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.begin = {line_, column_};
            t.offset = pos_;
            if (pos_ >= text_.size()) {
                t.kind = Tok::End;
                t.end = t.begin;
                t.end_offset = pos_;
                out.push_back(t);
                return out;
            }
            lex(t);
            t.end = {line_, column_};
            t.end_offset = pos_;
            t.text = std::string(text_.substr(t.offset, pos_ - t.offset));
            out.push_back(std::move(t));
        }
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    [[noreturn]] void fail(const std::string& message) const {
        SourceSpan span{file_, {line_, column_}, {line_, column_ + 1}};
        throw Error(ErrorCode::Syntax, message, span);
    }

    void skip_space() {
        for (;;) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            }
            if (peek() == '%' && peek(1) == '*') {
                advance(2);
                while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '%')) {
                    advance();
                }
                if (pos_ >= text_.size()) {
                    fail("unterminated block comment");
                }
                advance(2);
            } else if (peek() == '%') {
                while (pos_ < text_.size() && peek() != '\n') {
                    advance();
                }
            } else {
                return;
            }
        }
    }

    static bool word_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }

    void lex(Token& t) {
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                advance();
            }
            auto digits = text_.substr(start, pos_ - start);
            auto result = std::from_chars(digits.data(), digits.data() + digits.size(), t.number);
            if (result.ec != std::errc()) {
                fail("integer out of range");
            }
            t.kind = Tok::Number;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (word_char(peek())) {
                advance();
            }
            std::string_view word = text_.substr(start, pos_ - start);
            if (word == "_") {
                t.kind = Tok::Anonymous;
            } else if (word == "not") {
                t.kind = Tok::Not;
            } else if (std::isupper(static_cast<unsigned char>(word[0])) || word[0] == '_') {
                t.kind = Tok::Variable;
            } else {
                t.kind = Tok::Ident;
            }
            return;
        }
        if (c == '#') {
            std::size_t start = pos_;
            advance();
            while (word_char(peek())) {
                advance();
            }
            std::string_view word = text_.substr(start, pos_ - start);
            if (word == "#count") {
                t.kind = Tok::Count;
            } else if (word == "#sum") {
                t.kind = Tok::Sum;
            } else if (word == "#inf") {
                t.kind = Tok::Inf;
            } else if (word == "#sup") {
                t.kind = Tok::Sup;
            } else {
                fail("unsupported directive '" + std::string(word) + "'");
            }
            return;
        }
        auto two = [&](char a, char b) { return peek() == a && peek(1) == b; };
        if (two(':', '-')) { advance(2); t.kind = Tok::If; return; }
        if (two('.', '.')) { advance(2); t.kind = Tok::DotDot; return; }
        if (two('!', '=')) { advance(2); t.kind = Tok::Ne; return; }
        if (two('<', '=')) { advance(2); t.kind = Tok::Le; return; }
        if (two('>', '=')) { advance(2); t.kind = Tok::Ge; return; }
        if (two('=', '=')) { advance(2); t.kind = Tok::Eq; return; }
        if (two('<', '>')) { advance(2); t.kind = Tok::Ne; return; }
        advance();
        switch (c) {
        case '(': t.kind = Tok::LParen; return;
        case ')': t.kind = Tok::RParen; return;
        case '{': t.kind = Tok::LBrace; return;
        case '}': t.kind = Tok::RBrace; return;
        case '[': t.kind = Tok::LBracket; return;
        case ']': t.kind = Tok::RBracket; return;
        case ',': t.kind = Tok::Comma; return;
        case ';': t.kind = Tok::Semicolon; return;
        case '.': t.kind = Tok::Dot; return;
        case ':': t.kind = Tok::Colon; return;
        case '|': t.kind = Tok::Bar; return;
        case '=': t.kind = Tok::Eq; return;
        case '<': t.kind = Tok::Lt; return;
        case '>': t.kind = Tok::Gt; return;
        case '+': t.kind = Tok::Plus; return;
        case '-': t.kind = Tok::Minus; return;
        case '*': t.kind = Tok::Star; return;
        case '/': t.kind = Tok::Slash; return;
        case '\\': t.kind = Tok::Backslash; return;
        default: break;
        }
        line_ = t.begin.line;
        column_ = t.begin.column;
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    const std::string& file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class Parser {
public:
    Parser(std::string_view text, const std::string& file)
        : text_(text), file_(file), tokens_(Lexer(text, file).run()) {}

    ProgramAst program(std::size_t first_id) {
        ProgramAst out;
        std::size_t id = first_id;
        while (peek().kind != Tok::End) {
            out.rules.push_back(rule(id++));
        }
        return out;
    }

    Atom ground_atom_only() {
        AtomAst a = atom();
        expect(Tok::End, "end of input");
        return to_ground(a);
    }

    AtomSet atom_list() {
        std::vector<Atom> atoms;
        bool braces = accept(Tok::LBrace);
        if (peek().kind != Tok::End && peek().kind != Tok::RBrace) {
            do {
                atoms.push_back(to_ground(atom()));
            } while (accept(Tok::Comma));
        }
        if (braces) {
            expect(Tok::RBrace, "'}'");
        }
        expect(Tok::End, "end of input");
        return AtomSet(std::move(atoms));
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }

    const Token& next() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) {
            ++pos_;
        }
        return t;
    }

    bool accept(Tok kind) {
        if (peek().kind == kind) {
            next();
            return true;
        }
        return false;
    }

    SourceSpan span_of(const Token& t) const { return SourceSpan{file_, t.begin, t.end}; }

    SourceSpan span_from(const Token& first) const {
        const Token& last = tokens_[pos_ > 0 ? pos_ - 1 : 0];
        return SourceSpan{file_, first.begin, last.end};
    }

    [[noreturn]] void fail(const std::string& expected) const {
        throw Error(ErrorCode::Syntax, "expected " + expected + " but found " + describe(peek()), span_of(peek()));
    }

    const Token& expect(Tok kind, const std::string& what) {
        if (peek().kind != kind) {
            fail(what);
        }
        return next();
    }

    Atom to_ground(const AtomAst& a) const {
        std::vector<Term> args;
        for (const TermAst& t : a.args) {
            if (t.kind == TermAst::Kind::Number) {
                args.push_back(Term::number(t.number));
            } else if (t.kind == TermAst::Kind::Unary && t.children[0].kind == TermAst::Kind::Number) {
                args.push_back(Term::number(-t.children[0].number));
            } else if (t.kind == TermAst::Kind::Symbol) {
                args.push_back(Term::symbol(t.name));
            } else {
                throw Error(ErrorCode::Syntax, "expected a ground atom, found " + a.str(), a.span);
            }
        }
        return Atom(a.predicate, std::move(args));
    }

    RuleAst rule(std::size_t id) {
        const Token& first = peek();
        RuleAst r;
        r.id = id;
        if (peek().kind != Tok::If) {
            r.head = head();
        }
        if (accept(Tok::If)) {
            if (peek().kind != Tok::Dot) {
                do {
                    r.body.push_back(literal());
                } while (accept(Tok::Comma));
            }
        } else if (r.head.kind == HeadAst::Kind::Constraint) {
            fail("':-'");
        }
        const Token& dot = expect(Tok::Dot, "'.'");
        r.span = SourceSpan{file_, first.begin, dot.end};
        r.text = std::string(text_.substr(first.offset, dot.end_offset - first.offset));
        return r;
    }

    bool starts_bound_then(std::initializer_list<Tok> followers) {
        // Speculatively parse a term and check the following token.
        std::size_t saved = pos_;
        bool ok = false;
        try {
            term();
            for (Tok f : followers) {
                ok = ok || peek().kind == f;
            }
        } catch (const Error&) {
            ok = false;
        }
        pos_ = saved;
        return ok;
    }

    HeadAst head() {
        HeadAst h;
        if (peek().kind == Tok::LBrace || (peek().kind != Tok::Ident && starts_bound_then({Tok::LBrace}))) {
            h.kind = HeadAst::Kind::Choice;
            if (peek().kind != Tok::LBrace) {
                h.lower = term();
            }
            expect(Tok::LBrace, "'{'");
            if (peek().kind != Tok::RBrace) {
                do {
                    ChoiceElementAst e;
                    e.atom = atom();
                    if (accept(Tok::Colon)) {
                        e.conditions = conditions();
                    }
                    h.elements.push_back(std::move(e));
                } while (accept(Tok::Semicolon) || accept(Tok::Comma));
            }
            expect(Tok::RBrace, "'}'");
            if (starts_term()) {
                h.upper = term();
            }
            return h;
        }
        h.kind = HeadAst::Kind::Disjunction;
        do {
            const Token& first = peek();
            LiteralAst l;
            if (peek().kind == Tok::Lt) {
                l.kind = LiteralAst::Kind::Explicit;
                l.explicit_atom = explicit_atom();
            } else if (peek().kind == Tok::LBracket || (peek().kind != Tok::Ident && starts_bound_then({Tok::LBracket}))) {
                l.kind = LiteralAst::Kind::Aggregate;
                l.aggregate = aggregate();
            } else {
                l.kind = LiteralAst::Kind::Atom;
                l.atom = atom();
            }
            l.span = span_from(first);
            h.disjuncts.push_back(std::move(l));
        } while (accept(Tok::Bar));
        return h;
    }

    std::vector<LiteralAst> conditions() {
        std::vector<LiteralAst> out;
        do {
            out.push_back(literal());
        } while (accept(Tok::Comma));
        return out;
    }

    bool starts_term() const {
        switch (peek().kind) {
        case Tok::Number:
        case Tok::Variable:
        case Tok::Minus:
        case Tok::LParen:
        case Tok::Inf:
        case Tok::Sup:
            return true;
        default:
            return false;
        }
    }

    static bool comparison(Tok kind, Comparison& op) {
        switch (kind) {
        case Tok::Eq: op = Comparison::Eq; return true;
        case Tok::Ne: op = Comparison::Ne; return true;
        case Tok::Lt: op = Comparison::Lt; return true;
        case Tok::Le: op = Comparison::Le; return true;
        case Tok::Gt: op = Comparison::Gt; return true;
        case Tok::Ge: op = Comparison::Ge; return true;
        default: return false;
        }
    }

    LiteralAst literal() {
        const Token& first = peek();
        LiteralAst l;
        l.negated = accept(Tok::Not);
        Tok k = peek().kind;
        Comparison op;
        if (k == Tok::Lt) {
            l.kind = LiteralAst::Kind::Explicit;
            l.explicit_atom = explicit_atom();
        } else if (k == Tok::LBrace || k == Tok::LBracket || k == Tok::Count || k == Tok::Sum) {
            l.kind = LiteralAst::Kind::Aggregate;
            l.aggregate = aggregate();
        } else if (k == Tok::Ident && !comparison(peek(1).kind, op)) {
            l.kind = LiteralAst::Kind::Atom;
            l.atom = atom();
        } else {
            TermAst lhs = term();
            k = peek().kind;
            if (k == Tok::LBrace || k == Tok::LBracket || k == Tok::Count || k == Tok::Sum) {
                l.kind = LiteralAst::Kind::Aggregate;
                l.aggregate = aggregate(std::move(lhs));
            } else if (comparison(k, op)) {
                if (l.negated) {
                    fail("a literal after 'not'");
                }
                next();
                l.kind = LiteralAst::Kind::Compare;
                l.op = op;
                l.lhs = std::move(lhs);
                l.rhs = range_term();
            } else {
                fail("a literal");
            }
        }
        l.span = span_from(first);
        return l;
    }

    AggregateAst aggregate(std::optional<TermAst> lower = std::nullopt) {
        AggregateAst a;
        a.lower = std::move(lower);
        if (!a.lower && peek().kind != Tok::LBrace && peek().kind != Tok::LBracket &&
            peek().kind != Tok::Count && peek().kind != Tok::Sum) {
            a.lower = term();
        }
        bool sum = accept(Tok::Sum);
        if (!sum) {
            accept(Tok::Count);
        }
        if (accept(Tok::LBracket) || (sum && accept(Tok::LBrace))) {
            a.weighted = true;
            Tok close = tokens_[pos_ - 1].kind == Tok::LBracket ? Tok::RBracket : Tok::RBrace;
            if (peek().kind != close) {
                do {
                    AggregateElementAst e;
                    e.negated = accept(Tok::Not);
                    e.atom = atom();
                    if (accept(Tok::Eq)) {
                        e.weight = term();
                    }
                    while (accept(Tok::Colon)) {
                        e.conditions.push_back(literal());
                    }
                    a.elements.push_back(std::move(e));
                } while (accept(Tok::Comma) || accept(Tok::Semicolon));
            }
            expect(close, close == Tok::RBracket ? "']'" : "'}'");
        } else {
            expect(Tok::LBrace, "'{' or '['");
            if (peek().kind != Tok::RBrace) {
                do {
                    AggregateElementAst e;
                    e.negated = accept(Tok::Not);
                    e.atom = atom();
                    if (accept(Tok::Colon)) {
                        e.conditions = conditions();
                    }
                    a.elements.push_back(std::move(e));
                } while (accept(Tok::Semicolon) || accept(Tok::Comma));
            }
            expect(Tok::RBrace, "'}'");
        }
        if (starts_term()) {
            a.upper = term();
        }
        return a;
    }

    ExplicitAst explicit_atom() {
        ExplicitAst e;
        expect(Tok::Lt, "'<'");
        e.domain = atom_set();
        expect(Tok::Comma, "','");
        expect(Tok::LBrace, "'{'");
        if (peek().kind != Tok::RBrace) {
            do {
                e.satisfiers.push_back(atom_set());
            } while (accept(Tok::Comma));
        }
        expect(Tok::RBrace, "'}'");
        expect(Tok::Gt, "'>'");
        return e;
    }

    std::vector<AtomAst> atom_set() {
        std::vector<AtomAst> out;
        expect(Tok::LBrace, "'{'");
        if (peek().kind != Tok::RBrace) {
            do {
                out.push_back(atom());
            } while (accept(Tok::Comma));
        }
        expect(Tok::RBrace, "'}'");
        return out;
    }

    AtomAst atom() {
        const Token& first = peek();
        AtomAst a;
        a.predicate = expect(Tok::Ident, "an atom").text;
        if (accept(Tok::LParen)) {
            do {
                a.args.push_back(pool_term());
            } while (accept(Tok::Comma));
            expect(Tok::RParen, "')'");
        }
        a.span = span_from(first);
        return a;
    }

    TermAst pool_term() {
        TermAst first = range_term();
        if (peek().kind != Tok::Semicolon) {
            return first;
        }
        TermAst pool;
        pool.kind = TermAst::Kind::Pool;
        pool.children.push_back(std::move(first));
        while (accept(Tok::Semicolon)) {
            pool.children.push_back(range_term());
        }
        return pool;
    }

    TermAst range_term() {
        TermAst lo = term();
        if (!accept(Tok::DotDot)) {
            return lo;
        }
        TermAst r;
        r.kind = TermAst::Kind::Range;
        r.children.push_back(std::move(lo));
        r.children.push_back(term());
        return r;
    }

    TermAst term() {
        TermAst lhs = product();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            char op = next().kind == Tok::Plus ? '+' : '-';
            lhs = binary(op, std::move(lhs), product());
        }
        return lhs;
    }

    TermAst product() {
        TermAst lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash || peek().kind == Tok::Backslash) {
            Tok k = next().kind;
            char op = k == Tok::Star ? '*' : (k == Tok::Slash ? '/' : '\\');
            lhs = binary(op, std::move(lhs), unary());
        }
        return lhs;
    }

    static TermAst binary(char op, TermAst lhs, TermAst rhs) {
        TermAst t;
        t.kind = TermAst::Kind::Binary;
        t.op = op;
        t.children.push_back(std::move(lhs));
        t.children.push_back(std::move(rhs));
        return t;
    }

    TermAst unary() {
        if (accept(Tok::Minus)) {
            TermAst operand = unary();
            if (operand.kind == TermAst::Kind::Number) {
                operand.number = -operand.number;
                return operand;
            }
            TermAst t;
            t.kind = TermAst::Kind::Unary;
            t.op = '-';
            t.children.push_back(std::move(operand));
            return t;
        }
        return primary();
    }

    TermAst primary() {
        TermAst t;
        const Token& tok = peek();
        switch (tok.kind) {
        case Tok::Number:
            t.kind = TermAst::Kind::Number;
            t.number = next().number;
            return t;
        case Tok::Inf:
            next();
            t.kind = TermAst::Kind::Number;
            t.number = std::numeric_limits<std::int64_t>::min();
            return t;
        case Tok::Sup:
            next();
            t.kind = TermAst::Kind::Number;
            t.number = std::numeric_limits<std::int64_t>::max();
            return t;
        case Tok::Ident:
            if (peek(1).kind == Tok::LParen) {
                throw Error(ErrorCode::Syntax, "function terms are not supported", span_of(tok));
            }
            t.kind = TermAst::Kind::Symbol;
            t.name = next().text;
            return t;
        case Tok::Variable:
            t.kind = TermAst::Kind::Variable;
            t.name = next().text;
            return t;
        case Tok::Anonymous:
            next();
            t.kind = TermAst::Kind::Anonymous;
            return t;
        case Tok::LParen: {
            next();
            TermAst inner = range_term();
            expect(Tok::RParen, "')'");
            return inner;
        }
        default:
            fail("a term");
        }
    }

    std::string_view text_;
    std::string file_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

ProgramAst parse_program(std::string_view text, const std::string& file, std::size_t first_id) {
    return Parser(text, file).program(first_id);
}

Atom parse_ground_atom(std::string_view text) {
    return Parser(text, {}).ground_atom_only();
}

AtomSet parse_atom_list(std::string_view text) {
    return Parser(text, {}).atom_list();
}

} // namespace acpstep
