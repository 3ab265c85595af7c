#include "cdeq/parse.hpp"

#include <cctype>

namespace cdeq {
namespace {

enum class Tok { ident, number, lparen, rparen, comma, period, arrow, lt, le, gt, ge, eq, at, end };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_space();
        int line = line_, col = col_;
        if (pos_ >= text_.size()) return {Tok::end, "", line, col};
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                advance();
            return {Tok::ident, std::string(text_.substr(start, pos_ - start)), line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            return lex_number(line, col);
        }
        switch (c) {
            case '(': advance(); return {Tok::lparen, "(", line, col};
            case ')': advance(); return {Tok::rparen, ")", line, col};
            case ',': advance(); return {Tok::comma, ",", line, col};
            case '.': advance(); return {Tok::period, ".", line, col};
            case '@': advance(); return {Tok::at, "@", line, col};
            case '=': advance(); return {Tok::eq, "=", line, col};
            case '<':
                advance();
                if (peek() == '=') { advance(); return {Tok::le, "<=", line, col}; }
                return {Tok::lt, "<", line, col};
            case '>':
                advance();
                if (peek() == '=') { advance(); return {Tok::ge, ">=", line, col}; }
                return {Tok::gt, ">", line, col};
            case ':':
                advance();
                if (peek() == '-') { advance(); return {Tok::arrow, ":-", line, col}; }
                throw ParseError(line, col, "expected ':-'");
            default:
                throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
    }

  private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char peek2() const { return pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0'; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    // Integer, fraction "a/b", or decimal "a.b". A '.' only joins the number
    // when a digit follows, so "A(1)." still ends with a period token.
    Token lex_number(int line, int col) {
        std::size_t start = pos_;
        if (peek() == '-') advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        if (peek() == '/' && std::isdigit(static_cast<unsigned char>(peek2()))) {
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        } else if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek2()))) {
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        }
        return {Tok::number, std::string(text_.substr(start, pos_ - start)), line, col};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    explicit Parser(std::string_view text) : lexer_(text) { shift(); }

    Query query() {
        Query q;
        Token name = expect(Tok::ident, "query name");
        q.head = name.text;
        expect(Tok::lparen, "'('");
        if (cur_.kind != Tok::rparen) head_args(q);
        expect(Tok::rparen, "')'");
        expect(Tok::arrow, "':-'");
        body(q);
        expect(Tok::period, "'.'");
        if (cur_.kind != Tok::end) throw ParseError(cur_.line, cur_.col, "trailing input after query");
        q.canonicalize();
        try {
            validate(q);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(name.line, name.col, e.what());
        }
        return q;
    }

    Database database() {
        Database d;
        while (cur_.kind != Tok::end) {
            Token rel = expect(Tok::ident, "relation name");
            Fact f;
            f.relation = rel.text;
            expect(Tok::lparen, "'('");
            if (cur_.kind != Tok::rparen) {
                f.args.push_back(constant());
                while (accept(Tok::comma)) f.args.push_back(constant());
            }
            expect(Tok::rparen, "')'");
            if (accept(Tok::at)) {
                Token n = expect(Tok::number, "annotation");
                auto r = parse_rational(n.text);
                if (!r || r->denominator() != 1 || r->numerator() < 0)
                    throw ParseError(n.line, n.col, "annotation must be a natural number");
                f.annotation = static_cast<Annotation>(r->numerator());
            }
            expect(Tok::period, "'.'");
            check_arity(rel, f.relation, f.args.size());
            d.add(f);
        }
        return d;
    }

  private:
    void head_args(Query& q) {
        while (true) {
            Token t = expect(Tok::ident, "head variable or aggregate");
            if (cur_.kind == Tok::lparen) {
                // Last head argument: countd(y) or a general aggregate.
                shift();
                Aggregate agg;
                agg.kind = t.text == "countd" ? AggregateKind::count_distinct : AggregateKind::general;
                agg.name = t.text;
                agg.vars.push_back(Term::var(expect(Tok::ident, "aggregate variable").text));
                while (accept(Tok::comma))
                    agg.vars.push_back(Term::var(expect(Tok::ident, "aggregate variable").text));
                expect(Tok::rparen, "')'");
                if (agg.kind == AggregateKind::count_distinct && agg.vars.size() != 1)
                    throw ParseError(t.line, t.col, "countd takes exactly one variable");
                q.aggregate = std::move(agg);
                if (cur_.kind == Tok::comma)
                    throw ParseError(cur_.line, cur_.col, "aggregate must be the last head argument");
                return;
            }
            q.disting.push_back(Term::var(t.text));
            if (!accept(Tok::comma)) return;
        }
    }

    void body(Query& q) {
        while (true) {
            conjunct(q);
            if (!accept(Tok::comma)) return;
        }
    }

    void conjunct(Query& q) {
        if (cur_.kind == Tok::ident) {
            Token t = cur_;
            shift();
            if (cur_.kind == Tok::lparen) {
                shift();
                Atom a;
                a.relation = t.text;
                if (cur_.kind != Tok::rparen) {
                    a.args.push_back(term());
                    while (accept(Tok::comma)) a.args.push_back(term());
                }
                expect(Tok::rparen, "')'");
                check_arity(t, a.relation, a.args.size());
                q.atoms.push_back(std::move(a));
                return;
            }
            comparison(q, Term::var(t.text));
            return;
        }
        if (cur_.kind == Tok::number) {
            Term lhs = Term::constant(constant());
            comparison(q, lhs);
            return;
        }
        throw ParseError(cur_.line, cur_.col, "expected atom or comparison");
    }

    void comparison(Query& q, Term lhs) {
        Tok op = cur_.kind;
        if (op != Tok::lt && op != Tok::le && op != Tok::gt && op != Tok::ge && op != Tok::eq)
            throw ParseError(cur_.line, cur_.col, "expected comparison operator");
        shift();
        Term rhs = term();
        Comparison c;
        switch (op) {
            case Tok::lt: c = {lhs, CompareOp::lt, rhs}; break;
            case Tok::le: c = {lhs, CompareOp::le, rhs}; break;
            case Tok::gt: c = {rhs, CompareOp::lt, lhs}; break;
            case Tok::ge: c = {rhs, CompareOp::le, lhs}; break;
            default: c = {lhs, CompareOp::eq, rhs}; break;
        }
        q.comparisons.comparisons.push_back(c);
    }

    Term term() {
        if (cur_.kind == Tok::ident) {
            Token t = cur_;
            shift();
            return Term::var(t.text);
        }
        return Term::constant(constant());
    }

    Rational constant() {
        Token n = expect(Tok::number, "constant");
        auto r = parse_rational(n.text);
        if (!r) throw ParseError(n.line, n.col, "malformed rational constant '" + n.text + "'");
        return *r;
    }

    void check_arity(const Token& at, const std::string& relation, std::size_t arity) {
        auto [it, fresh] = arities_.emplace(relation, arity);
        if (!fresh && it->second != arity)
            throw ParseError(at.line, at.col,
                             "relation " + relation + " used with arity " + std::to_string(arity) +
                                 " but first used with arity " + std::to_string(it->second));
    }

    Token expect(Tok kind, const std::string& what) {
        if (cur_.kind != kind)
            throw ParseError(cur_.line, cur_.col, "expected " + what);
        Token t = cur_;
        shift();
        return t;
    }

    bool accept(Tok kind) {
        if (cur_.kind != kind) return false;
        shift();
        return true;
    }

    void shift() { cur_ = lexer_.next(); }

    Lexer lexer_;
    Token cur_{Tok::end, "", 0, 0};
    std::map<std::string, std::size_t> arities_;
};

} // namespace

Query parse_query(std::string_view text) { return Parser(text).query(); }

Database parse_database(std::string_view text) { return Parser(text).database(); }

} // namespace cdeq
