#pragma once

#include <stdexcept>
#include <string>

namespace jnt {

// Broad failure classes; the CLI maps each to an exit code.
enum class ErrorKind { input, numerical, config };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define JNT_DEFINE_ERROR(Name, Kind)                                        \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

// Ingestion and data-validity failures.
JNT_DEFINE_ERROR(ParseError, input)
JNT_DEFINE_ERROR(GridError, input)
JNT_DEFINE_ERROR(ReferenceError, input)
JNT_DEFINE_ERROR(DomainError, input)
JNT_DEFINE_ERROR(IoError, input)

// Numerical failures.
JNT_DEFINE_ERROR(SingularFitError, numerical)
JNT_DEFINE_ERROR(UnderdeterminedError, numerical)
JNT_DEFINE_ERROR(InconsistencyError, numerical)
JNT_DEFINE_ERROR(ScanError, numerical)
JNT_DEFINE_ERROR(DesignError, numerical)
JNT_DEFINE_ERROR(LeverageError, numerical)
JNT_DEFINE_ERROR(TestError, numerical)

// Bad arguments or configuration.
JNT_DEFINE_ERROR(ArgumentError, config)
JNT_DEFINE_ERROR(ConfigError, config)

#undef JNT_DEFINE_ERROR

/// Process exit code for an error class: 2 input, 3 numerical, 4 config.
int exit_code(ErrorKind kind) noexcept;

}  // namespace jnt
