#ifndef DOCTRINA_ERROR_HPP
#define DOCTRINA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace doctrina {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Context/sort mismatches, undeclared symbols, ill-formed tuples.
class StructuralError : public Error {
public:
  using Error::Error;
};

// An operation is not available in the theory's fragment (e.g. join in Horn mode).
class FragmentError : public Error {
public:
  using Error::Error;
};

// Model enumeration would exceed the configured table cap.
class RefusalError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(std::string message, std::size_t line, std::size_t column,
             std::string token)
      : Error(format(message, line, column, token)), line_(line),
        column_(column), token_(std::move(token)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& token() const { return token_; }

private:
  static std::string format(const std::string& message, std::size_t line,
                            std::size_t column, const std::string& token) {
    std::string out = std::to_string(line) + ":" + std::to_string(column) +
                      ": " + message;
    if (!token.empty())
      out += " (at '" + token + "')";
    return out;
  }

  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

} // namespace doctrina

#endif // DOCTRINA_ERROR_HPP
