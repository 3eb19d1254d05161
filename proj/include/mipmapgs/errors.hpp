#pragma once

#include <stdexcept>
#include <string>

namespace mgs {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateCovariance final : Error {
    explicit DegenerateCovariance(const std::string& what) : Error(what) {}
};
struct NonFiniteGradient final : Error {
    explicit NonFiniteGradient(const std::string& what) : Error(what) {}
};
struct DimensionMismatch final : Error {
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};
struct InvalidZoom final : Error {
    explicit InvalidZoom(const std::string& what) : Error(what) {}
};
struct InvalidFactor final : Error {
    explicit InvalidFactor(const std::string& what) : Error(what) {}
};
struct InvalidConfig final : Error {
    explicit InvalidConfig(const std::string& what) : Error(what) {}
};
struct EmptyViewSet final : Error {
    explicit EmptyViewSet(const std::string& what) : Error(what) {}
};
struct TooSmall final : Error {
    explicit TooSmall(const std::string& what) : Error(what) {}
};
struct ParseError final : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};
struct IoError final : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace mgs
