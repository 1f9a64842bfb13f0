#include "ellip/parse.hpp"

#include <cctype>
#include <map>
#include <set>
#include <vector>

namespace ellip {

namespace {

struct Token {
    enum Kind { Word, Number, Equals, Plus, Minus, End } kind;
    std::string text;
    std::size_t line, col;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') { ++line_; col_ = 1; ++pos_; continue; }
            if (std::isspace(static_cast<unsigned char>(c))) { ++col_; ++pos_; continue; }
            break;
        }
        if (pos_ >= src_.size()) return {Token::End, "", line_, col_};
        std::size_t line = line_, col = col_;
        char c = src_[pos_];
        if (c == '=') { advance(1); return {Token::Equals, "=", line, col}; }
        if (c == '+') { advance(1); return {Token::Plus, "+", line, col}; }
        if (c == '-') { advance(1); return {Token::Minus, "-", line, col}; }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            advance(1);
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                advance(1);
            return {Token::Word, src_.substr(start, pos_ - start), line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '/'))
                advance(1);
            return {Token::Number, src_.substr(start, pos_ - start), line, col};
        }
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }

private:
    void advance(std::size_t by) { pos_ += by; col_ += by; }
    const std::string& src_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

struct DslTerm {
    Rational coeff;
    std::vector<std::size_t> derivs; // 1-based axis indices, repeated per order
    std::size_t u_index = 0;         // 1-based
};

struct DslStatement {
    std::size_t w_index = 0; // 1-based
    std::vector<DslTerm> terms;
};

class DslParser {
public:
    explicit DslParser(const std::string& src) : lex_(src) { shift(); }

    std::vector<DslStatement> parse() {
        std::vector<DslStatement> stmts;
        while (tok_.kind != Token::End) {
            stmts.push_back(statement());
            // statements separated by ';' arrive as a Word? no: ';' unhandled
        }
        if (stmts.empty()) throw ParseError(1, 1, "empty operator");
        return stmts;
    }

private:
    void shift() { tok_ = lex_.next(); }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(tok_.line, tok_.col, msg);
    }

    std::size_t word_index(const std::string& expected_prefix) {
        if (tok_.kind != Token::Word || tok_.text.size() < 2 ||
            tok_.text.substr(0, 1) != expected_prefix)
            fail("expected '" + expected_prefix + "INT', got '" + tok_.text + "'");
        std::size_t idx = 0;
        for (std::size_t i = 1; i < tok_.text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(tok_.text[i])))
                fail("expected '" + expected_prefix + "INT', got '" + tok_.text + "'");
            idx = idx * 10 + static_cast<std::size_t>(tok_.text[i] - '0');
        }
        if (idx == 0) fail("indices are 1-based");
        shift();
        return idx;
    }

    DslTerm term(bool negated) {
        DslTerm t;
        t.coeff = Rational(negated ? -1 : 1);
        if (tok_.kind == Token::Number) {
            Rational r;
            try {
                r = Rational::from_string(tok_.text);
            } catch (const std::exception&) {
                fail("bad rational literal '" + tok_.text + "'");
            }
            t.coeff *= r;
            shift();
        }
        if (!(tok_.kind == Token::Word && !tok_.text.empty() && tok_.text[0] == 'd'))
            fail("expected derivative 'dINT'");
        while (tok_.kind == Token::Word && !tok_.text.empty() && tok_.text[0] == 'd')
            t.derivs.push_back(word_index("d"));
        t.u_index = word_index("u");
        return t;
    }

    DslStatement statement() {
        DslStatement s;
        s.w_index = word_index("w");
        if (tok_.kind != Token::Equals) fail("expected '='");
        shift();
        s.terms.push_back(term(false));
        while (true) {
            if (tok_.kind == Token::Plus) { shift(); s.terms.push_back(term(false)); continue; }
            if (tok_.kind == Token::Minus) { shift(); s.terms.push_back(term(true)); continue; }
            if (tok_.kind == Token::End) break;
            if (tok_.kind == Token::Word && tok_.text[0] == 'w') break; // next statement
            fail("expected '+', '-' or end of statement, got '" + tok_.text + "'");
        }
        return s;
    }

    Lexer lex_;
    Token tok_{Token::End, "", 0, 0};
};

Operator operator_from_dsl(const std::string& source) {
    // ';' is an optional statement separator
    std::string cleaned = source;
    for (char& c : cleaned)
        if (c == ';') c = '\n';
    DslParser parser(cleaned);
    std::vector<DslStatement> stmts = parser.parse();

    std::size_t n = 0, dim_v = 0, dim_w = 0;
    std::size_t k = stmts[0].terms[0].derivs.size();
    std::set<std::size_t> w_seen;
    for (const auto& s : stmts) {
        if (!w_seen.insert(s.w_index).second)
            throw ParseError(1, 1, "duplicate output row w" + std::to_string(s.w_index));
        dim_w = std::max(dim_w, s.w_index);
        for (const auto& t : s.terms) {
            if (t.derivs.size() != k)
                throw ParseError(1, 1,
                                 "mixed total derivative order: expected " + std::to_string(k) +
                                     ", got " + std::to_string(t.derivs.size()));
            dim_v = std::max(dim_v, t.u_index);
            for (std::size_t d : t.derivs) n = std::max(n, d);
        }
    }

    std::map<MultiIndex, RatMat> terms;
    for (const auto& s : stmts) {
        for (const auto& t : s.terms) {
            MultiIndex alpha(n, 0);
            for (std::size_t d : t.derivs) ++alpha[d - 1];
            auto [it, inserted] = terms.try_emplace(alpha, RatMat(dim_w, dim_v));
            it->second(s.w_index - 1, t.u_index - 1) += t.coeff;
        }
    }
    return Operator(n, k, dim_v, dim_w, std::move(terms));
}

} // namespace

Operator operator_from_json(const nlohmann::json& j) {
    try {
        std::size_t n = j.at("n").get<std::size_t>();
        std::size_t k = j.at("k").get<std::size_t>();
        std::size_t dim_v = j.at("dim_v").get<std::size_t>();
        std::size_t dim_w = j.at("dim_w").get<std::size_t>();
        std::map<MultiIndex, RatMat> terms;
        for (const auto& term : j.at("terms")) {
            MultiIndex alpha;
            for (const auto& a : term.at("alpha")) alpha.push_back(a.get<unsigned>());
            const auto& rows = term.at("matrix");
            RatMat m(rows.size(), rows.empty() ? 0 : rows[0].size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != m.cols())
                    throw std::invalid_argument("ragged matrix");
                for (std::size_t c = 0; c < m.cols(); ++c) {
                    const auto& cell = rows[i][c];
                    m(i, c) = cell.is_string()
                                  ? Rational::from_string(cell.get<std::string>())
                                  : Rational(cell.get<long long>());
                }
            }
            auto [it, inserted] = terms.try_emplace(alpha, m);
            if (!inserted) throw std::invalid_argument("duplicate alpha in terms");
        }
        Operator op(n, k, dim_v, dim_w, std::move(terms));
        if (j.contains("name")) op.set_name(j.at("name").get<std::string>());
        return op;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, 1, std::string("operator JSON: ") + e.what());
    }
}

nlohmann::json operator_to_json(const Operator& op) {
    nlohmann::json j;
    if (!op.name().empty()) j["name"] = op.name();
    j["n"] = op.n();
    j["k"] = op.k();
    j["dim_v"] = op.dim_v();
    j["dim_w"] = op.dim_w();
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [alpha, mat] : op.terms()) {
        nlohmann::json t;
        t["alpha"] = alpha;
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < mat.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < mat.cols(); ++c) row.push_back(mat(i, c).str());
            rows.push_back(std::move(row));
        }
        t["matrix"] = std::move(rows);
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

nlohmann::json gaussian_to_json(const GaussianRational& g) {
    return nlohmann::json{{"re", g.re().str()}, {"im", g.im().str()}};
}

Operator parse_operator(const std::string& source) {
    for (char c : source) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') {
            nlohmann::json j = nlohmann::json::parse(source, nullptr, false);
            if (j.is_discarded()) throw ParseError(1, 1, "malformed JSON");
            return operator_from_json(j);
        }
        break;
    }
    return operator_from_dsl(source);
}

} // namespace ellip
