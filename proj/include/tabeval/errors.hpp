#pragma once

#include <stdexcept>
#include <string>

namespace tabeval {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class UnknownColumn : public Error {
public:
    explicit UnknownColumn(const std::string& name)
        : Error("unknown column: " + name), column(name) {}
    std::string column;
};

class NoLabelColumn : public Error {
public:
    NoLabelColumn() : Error("table has no label column") {}
};

class SchemaMismatch : public Error {
public:
    explicit SchemaMismatch(const std::string& detail)
        : Error("schema mismatch: " + detail) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& column, const std::string& content)
        : Error("parse error at row " + std::to_string(row) + ", column "
                + column + ": \"" + content + "\""),
          row(row), column(column), content(content) {}
    std::size_t row;
    std::string column;
    std::string content;
};

class EmptyFile : public Error {
public:
    explicit EmptyFile(const std::string& path) : Error("empty file: " + path) {}
};

class RaggedRow : public Error {
public:
    explicit RaggedRow(std::size_t row)
        : Error("ragged row " + std::to_string(row)), row(row) {}
    std::size_t row;
};

class MissingValue : public Error {
public:
    MissingValue(std::size_t row, const std::string& column)
        : Error("missing value at row " + std::to_string(row) + ", column "
                + column),
          row(row), column(column) {}
    std::size_t row;
    std::string column;
};

class NoNumericColumns : public Error {
public:
    NoNumericColumns() : Error("table has no numeric columns") {}
};

class BadK : public Error {
public:
    explicit BadK(std::size_t k) : Error("bad fold count k = " + std::to_string(k)), k(k) {}
    std::size_t k;
};

class EmptyColumn : public Error {
public:
    EmptyColumn() : Error("empty column") {}
    explicit EmptyColumn(const std::string& detail) : Error("empty column: " + detail) {}
};

class TooFewNumericColumns : public Error {
public:
    TooFewNumericColumns() : Error("need at least two numeric columns") {}
};

class NoSharedColumns : public Error {
public:
    NoSharedColumns() : Error("tables share no columns") {}
};

class CategoryMismatch : public Error {
public:
    explicit CategoryMismatch(const std::string& detail)
        : Error("category mismatch: " + detail) {}
};

class Unsupported : public Error {
public:
    explicit Unsupported(const std::string& what) : Error("unsupported: " + what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& detail) : Error("domain error: " + detail) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& detail)
        : Error("dimension mismatch: " + detail) {}
};

class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& detail)
        : Error("shape mismatch: " + detail) {}
};

class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& detail)
        : Error("degenerate input: " + detail) {}
};

class TooFewReferenceRows : public Error {
public:
    TooFewReferenceRows() : Error("need at least two reference rows") {}
};

class MissingLabels : public Error {
public:
    MissingLabels() : Error("conditional generator requires labels") {}
};

class NonFiniteLoss : public Error {
public:
    explicit NonFiniteLoss(const std::string& detail)
        : Error("non-finite loss: " + detail) {}
};

}  // namespace tabeval
