#pragma once

#include <stdexcept>
#include <string>

namespace manproj {

// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class RankDeficient : public Error {
public:
    explicit RankDeficient(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class EmptyRoi : public Error {
public:
    explicit EmptyRoi(const std::string& msg) : Error(msg) {}
};

class InsufficientSamples : public Error {
public:
    explicit InsufficientSamples(const std::string& msg) : Error(msg) {}
};

class SigmaExceedsReach : public Error {
public:
    explicit SigmaExceedsReach(const std::string& msg) : Error(msg) {}
};

class AmbiguousProjection : public Error {
public:
    explicit AmbiguousProjection(const std::string& msg) : Error(msg) {}
};

class DegenerateTransport : public Error {
public:
    explicit DegenerateTransport(const std::string& msg) : Error(msg) {}
};

// CSV or config parse failure; carries the 1-based row number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long row = -1) : Error(msg), row_(row) {}
    long row() const { return row_; }

private:
    long row_;
};

} // namespace manproj
