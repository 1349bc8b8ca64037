#pragma once

#include <stdexcept>
#include <string>

namespace linemark {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// geometry
class DegenerateCorrespondences : public Error {
public:
    using Error::Error;
};
class HorizonSingularity : public Error {
public:
    using Error::Error;
};
class OutOfWorkingArea : public Error {
public:
    using Error::Error;
};

// simulator
class UnknownTemplate : public Error {
public:
    using Error::Error;
};
class FrameOutOfRange : public Error {
public:
    using Error::Error;
};

// linefit
class DegenerateFit : public Error {
public:
    using Error::Error;
};

// filter / eval
class KindMismatch : public Error {
public:
    using Error::Error;
};
class FrameMisalignment : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration / calibration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Missing, unreadable or corrupt data files. The message carries the path.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace linemark
