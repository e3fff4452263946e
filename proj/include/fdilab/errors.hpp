// errors.hpp — exception types thrown by the kernel/environment/QBM pipeline

#pragma once

#include <stdexcept>
#include <string>

namespace fdilab {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A matrix function that must be Hermitian per frequency point is not.
class NonHermitianInput : public Error {
public:
    using Error::Error;
};

// Frequency grid lacks exact ±ω pairs (or ω = 0).
class GridAsymmetric : public Error {
public:
    using Error::Error;
};

// Two matrix functions do not share the same frequency grid.
class GridMismatch : public Error {
public:
    using Error::Error;
};

// Time step too coarse for the grid bandwidth (dt > π/ω_max).
class AliasingRisk : public Error {
public:
    using Error::Error;
};

// Channel-mixing matrix is not Hermitian positive semidefinite.
class MixingNotPositive : public Error {
public:
    using Error::Error;
};

// Lorentzian line width below twice the grid spacing (undersampled lines).
class BroadeningTooNarrow : public Error {
public:
    using Error::Error;
};

// Damping kernel vanishes somewhere a scalar FDR kernel was requested.
class DampingVanishes : public Error {
public:
    using Error::Error;
};

// Damping kernel not positive definite where a Lyapunov solve needs it.
class NotDamping : public Error {
public:
    using Error::Error;
};

// No populated transition line within broadening of the requested frequency.
class NoTransitionNearOmega : public Error {
public:
    using Error::Error;
};

// Requested frequency lies outside the grid.
class OffGrid : public Error {
public:
    using Error::Error;
};

// Time kernel window shorter than the requested integration time.
class KernelWindowTooShort : public Error {
public:
    using Error::Error;
};

// Noise spectrum has a negative eigenvalue beyond tolerance.
class SpectrumNotPositive : public Error {
public:
    using Error::Error;
};

// Trajectory integration blew up (energy growth beyond safety factor).
class Unstable : public Error {
public:
    using Error::Error;
};

// Malformed experiment specification (unknown key, missing or invalid value).
class SpecError : public Error {
public:
    using Error::Error;
};

} // namespace fdilab
