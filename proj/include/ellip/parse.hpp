#ifndef ELLIP_PARSE_HPP
#define ELLIP_PARSE_HPP

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ellip/operator.hpp"

namespace ellip {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t col, const std::string& msg)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}

    std::size_t line() const { return line_; }
    std::size_t col() const { return col_; }

private:
    std::size_t line_, col_;
};

/// Operator from JSON text or DSL text (autodetected on leading '{').
///
/// DSL, one output row per statement:
///   stmt := "w" INT "=" term (("+"|"-") term)*
///   term := [rational] ("d" INT)+ "u" INT
/// Every term must carry the same total derivative count.
Operator parse_operator(const std::string& source);

Operator operator_from_json(const nlohmann::json& j);
nlohmann::json operator_to_json(const Operator& op);

nlohmann::json gaussian_to_json(const GaussianRational& g);

} // namespace ellip

#endif
