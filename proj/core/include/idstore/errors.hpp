#pragma once

#include <stdexcept>
#include <string>

namespace idstore {

/// Base class for every domain error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- order book / replay ---
class UnknownOrderId : public Error { public: using Error::Error; };
class CrossedBookAfterAdd : public Error { public: using Error::Error; };
class EmptySide : public Error { public: using Error::Error; };
class InsufficientDepth : public Error { public: using Error::Error; };
class ZeroVolume : public Error { public: using Error::Error; };
class InvalidEvent : public Error { public: using Error::Error; };

// --- liquidity model calibration ---
class NegativeCoefficient : public Error { public: using Error::Error; };
class TooFewPoints : public Error { public: using Error::Error; };
class DegenerateDesign : public Error { public: using Error::Error; };
class InsufficientWindows : public Error { public: using Error::Error; };

// --- mid-price model ---
class EmptyJumpLaw : public Error { public: using Error::Error; };
class EmptySample : public Error { public: using Error::Error; };
class SameMaturity : public Error { public: using Error::Error; };
class NoJumpsObserved : public Error { public: using Error::Error; };

// --- valuation ---
class InfeasibleSpec : public Error { public: using Error::Error; };
class TooFewPaths : public Error { public: using Error::Error; };
class GridMismatch : public Error { public: using Error::Error; };
class StockViolation : public Error { public: using Error::Error; };

// --- backtest / synthetic data ---
class InsufficientHistory : public Error { public: using Error::Error; };
class MissingBook : public Error { public: using Error::Error; };
class InfeasibleLadder : public Error { public: using Error::Error; };

} // namespace idstore
