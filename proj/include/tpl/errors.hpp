#pragma once

#include <stdexcept>
#include <string>

namespace tpl {

/// Base class for all domain errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedRecord : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class EmptyLeafSet : public Error {
public:
    EmptyLeafSet() : Error("merkle commit requires at least one leaf") {}
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class UnknownDomain : public Error {
public:
    using Error::Error;
};

class NonMonotoneTimestamp : public Error {
public:
    using Error::Error;
};

class SelfTransfer : public Error {
public:
    using Error::Error;
};

class ValueOverflow : public Error {
public:
    using Error::Error;
};

class InvalidDomainRegistry : public Error {
public:
    using Error::Error;
};

class SigningFailure : public Error {
public:
    using Error::Error;
};

class CoinNotInSnapshot : public Error {
public:
    using Error::Error;
};

class SnapshotMismatch : public Error {
public:
    using Error::Error;
};

class LedgerSealed : public Error {
public:
    LedgerSealed() : Error("ledger is sealed for verification; mutations rejected") {}
};

class PayloadTooLarge : public Error {
public:
    using Error::Error;
};

class InvalidForkPoint : public Error {
public:
    using Error::Error;
};

class PlatformAssumptionViolated : public Error {
public:
    using Error::Error;
};

class SubstrateUnavailable : public Error {
public:
    using Error::Error;
};

class UnknownPolicy : public Error {
public:
    using Error::Error;
};

class MalformedAdversaryOutput : public Error {
public:
    using Error::Error;
};

}  // namespace tpl
