#ifndef XLR_ERROR_HPP
#define XLR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace xlr {

struct Diagnostic {
  enum Severity { Note, Warning, Err };
  Severity severity = Err;
  std::string message;
  int line = 0;
  int col = 0;

  bool is_error() const { return severity == Err; }
  std::string str() const;
};

/// \brief Error raised by a pipeline stage.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& msg, int line = 0, int col = 0);

  const std::string& stage() const { return stage_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  std::string stage_;
  int line_;
  int col_;
};

}  // namespace xlr

#endif
