// Text front end for the query (.cq) and database (.db) formats.
// The grammar is documented bit-exactly in docs/grammar.md.
#pragma once

#include "cdeq/query.hpp"

#include <string_view>

namespace cdeq {

struct ParseError : Error {
    ParseError(int line_, int col_, const std::string& msg)
        : Error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
    int line;
    int col;
};

/// Parses one query. Validates safety and arity consistency.
/// `>` and `>=` are accepted and stored with the operands swapped.
Query parse_query(std::string_view text);

/// Parses a sequence of facts; duplicate facts merge by adding annotations.
Database parse_database(std::string_view text);

} // namespace cdeq
