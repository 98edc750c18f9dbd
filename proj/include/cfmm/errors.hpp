#pragma once

#include <stdexcept>
#include <string>

namespace cfmm {

/// Input outside the mathematical domain of an operation (non-finite
/// argument, reserves off the trading-function domain, tau = 0 where a
/// positive time-to-expiry is required, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A swap or withdrawal would require more of an asset than the pool holds.
class LiquidityError : public std::runtime_error {
public:
    explicit LiquidityError(const std::string& what) : std::runtime_error(what) {}
};

/// A liquidity change that does not preserve the reported price.
class InvalidLiquidityError : public std::runtime_error {
public:
    explicit InvalidLiquidityError(const std::string& what) : std::runtime_error(what) {}
};

/// Manipulation epsilon with the wrong sign for the tendered asset.
class WrongDirectionError : public std::invalid_argument {
public:
    explicit WrongDirectionError(const std::string& what) : std::invalid_argument(what) {}
};

class UndercollateralizedError : public std::runtime_error {
public:
    explicit UndercollateralizedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cfmm
