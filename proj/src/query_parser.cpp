#include <algorithm>
#include <cctype>
#include <charconv>

#include "atch/query.hpp"

namespace atch {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    PatternQuery parse() {
        skip_space();
        expect_keyword("match");
        PatternQuery query;
        skip_space();
        if (peek() != '(') fail("expected '(' to open a template");
        while (peek() == '(') {
            query.templates.push_back(parse_template());
            skip_space();
        }
        while (!at_end()) {
            Mark where = mark();
            std::string word = read_word();
            if (word == "where") {
                if (query.min_confidence) fail_at(where, "duplicate 'where conf' clause");
                skip_space();
                expect_keyword("conf");
                skip_space();
                expect('>');
                skip_space();
                query.min_confidence = read_number();
            } else if (word == "at") {
                if (query.at_time) fail_at(where, "duplicate 'at time' clause");
                skip_space();
                expect_keyword("time");
                skip_space();
                query.at_time = read_timestamp();
            } else if (word == "during") {
                if (query.window) fail_at(where, "duplicate 'during' clause");
                skip_space();
                expect('[');
                skip_space();
                Mark open = mark();
                TimeInterval window;
                window.start = read_timestamp();
                skip_space();
                expect(',');
                skip_space();
                window.end = read_timestamp();
                skip_space();
                expect(']');
                if (!window.well_formed()) fail_at(open, "window start is after its end");
                query.window = window;
            } else {
                fail_at(where, word.empty() ? "unexpected character" : "unknown clause '" + word + "'");
            }
            skip_space();
        }
        return query;
    }

private:
    struct Mark {
        std::size_t pos, line, column;
    };

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    Mark mark() const { return {pos_, line_, column_}; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
            ++column_;
        }
        ++pos_;
        // Continuation bytes of a multibyte character share its column.
        while (!at_end() && (static_cast<unsigned char>(text_[pos_]) & 0xC0) == 0x80) ++pos_;
    }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(mark(), msg); }
    [[noreturn]] static void fail_at(const Mark& m, const std::string& msg) {
        throw PositionedError(ErrorCode::SyntaxError, msg, m.line, m.column);
    }

    void expect(char c) {
        if (peek() != c) {
            fail(std::string("expected '") + c + "'" + (at_end() ? " but the query ended" : ""));
        }
        advance();
    }

    static bool word_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    }

    std::string read_word() {
        std::size_t begin = pos_;
        while (!at_end() && word_char(peek())) advance();
        return std::string(text_.substr(begin, pos_ - begin));
    }

    void expect_keyword(std::string_view keyword) {
        Mark m = mark();
        if (read_word() != keyword) fail_at(m, "expected '" + std::string(keyword) + "'");
    }

    std::string read_quoted() {
        Mark m = mark();
        advance();
        std::string out;
        while (!at_end() && peek() != '"') {
            if (peek() == '\\') {
                advance();
                if (at_end()) break;
            }
            std::size_t begin = pos_;
            advance();
            out.append(text_.substr(begin, pos_ - begin));
        }
        if (at_end()) fail_at(m, "unterminated string");
        advance();
        return out;
    }

    // Bare token for numbers, timestamps and literals: stops at whitespace
    // and the grammar's punctuation.
    std::string read_raw() {
        std::size_t begin = pos_;
        while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
               peek() != '}' && peek() != ')')
            advance();
        return std::string(text_.substr(begin, pos_ - begin));
    }

    double read_number() {
        Mark m = mark();
        std::string raw = read_raw();
        double value = 0.0;
        auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
        if (raw.empty() || ec != std::errc() || end != raw.data() + raw.size()) fail_at(m, "expected a number");
        return value;
    }

    Timestamp read_timestamp() {
        Mark m = mark();
        std::string raw = read_raw();
        auto ts = Timestamp::parse(raw);
        if (!ts) fail_at(m, raw.empty() ? "expected a timestamp" : "malformed timestamp '" + raw + "'");
        return *ts;
    }

    Term parse_term(const Mark& after_comma) {
        skip_space();
        Term term;
        Mark m = mark();
        if (peek() == '"') {
            term.kind = Term::Kind::Constant;
            term.name = read_quoted();
        } else {
            term.name = read_word();
            if (term.name.empty()) {
                if (at_end() || peek() == ')') fail_at(after_comma, "expected a term");
                fail("expected a variable or constant");
            }
            char first = term.name.front();
            if (std::isupper(static_cast<unsigned char>(first))) {
                term.kind = Term::Kind::Constant;
            } else if (std::islower(static_cast<unsigned char>(first)) || first == '_') {
                term.kind = Term::Kind::Variable;
            } else {
                fail_at(m, "a term must start with a letter or '_'");
            }
        }
        skip_space();
        if (peek() == ':') {
            if (!term.is_variable()) fail("only variables take a role label");
            advance();
            skip_space();
            std::string label = peek() == '"' ? read_quoted() : read_word();
            if (label.empty()) fail("expected a role label after ':'");
            term.role = std::move(label);
            skip_space();
        }
        return term;
    }

    AttrValue parse_literal() {
        if (peek() == '"') return read_quoted();
        Mark m = mark();
        std::string raw = read_raw();
        if (raw.empty()) fail_at(m, "expected a literal");
        if (raw == "true") return true;
        if (raw == "false") return false;
        std::int64_t i = 0;
        auto [iend, iec] = std::from_chars(raw.data(), raw.data() + raw.size(), i);
        if (iec == std::errc() && iend == raw.data() + raw.size()) return i;
        double d = 0.0;
        auto [dend, dec] = std::from_chars(raw.data(), raw.data() + raw.size(), d);
        if (dec == std::errc() && dend == raw.data() + raw.size()) return d;
        if (auto ts = Timestamp::parse(raw)) return *ts;
        if (std::all_of(raw.begin(), raw.end(), word_char)) return raw;
        fail_at(m, "cannot read literal '" + raw + "'");
    }

    AttrPredicate parse_predicate() {
        skip_space();
        AttrPredicate pred;
        pred.key = peek() == '"' ? read_quoted() : read_word();
        if (pred.key.empty()) fail("expected an attribute key");
        skip_space();
        Mark m = mark();
        std::size_t begin = pos_;
        while (!at_end() && std::string_view("=!<>\xE2").find(peek()) != std::string_view::npos) {
            advance();
        }
        auto op = parse_compare_op(text_.substr(begin, pos_ - begin));
        if (!op) fail_at(m, "expected a comparison operator");
        pred.op = *op;
        skip_space();
        pred.literal = parse_literal();
        skip_space();
        return pred;
    }

    EdgeTemplate parse_template() {
        EdgeTemplate tmpl;
        Mark open = mark();
        expect('(');
        tmpl.terms.push_back(parse_term(open));
        while (peek() == ',') {
            Mark comma = mark();
            advance();
            tmpl.terms.push_back(parse_term(comma));
        }
        if (at_end()) fail_at(open, "unclosed template");
        expect(')');
        skip_space();
        if (peek() == '{') {
            Mark brace = mark();
            advance();
            tmpl.predicates.push_back(parse_predicate());
            while (peek() == ',') {
                advance();
                tmpl.predicates.push_back(parse_predicate());
            }
            if (at_end()) fail_at(brace, "unclosed attribute block");
            expect('}');
        }
        return tmpl;
    }
};

}  // namespace

PatternQuery parse_query(std::string_view text) { return Parser(text).parse(); }

}  // namespace atch
