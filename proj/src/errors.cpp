#include "wsnauth/errors.hpp"

namespace wsnauth {

std::string_view to_string(Error e) {
  switch (e) {
    case Error::DecodeError:
      return "DecodeError";
    case Error::UnknownType:
      return "UnknownType";
    case Error::LengthMismatch:
      return "LengthMismatch";
    case Error::InvalidPoint:
      return "InvalidPoint";
    case Error::InvalidScalar:
      return "InvalidScalar";
    case Error::StaleTimestamp:
      return "StaleTimestamp";
    case Error::ReplayDetected:
      return "ReplayDetected";
    case Error::BadMac:
      return "BadMac";
    case Error::IdMismatch:
      return "IdMismatch";
    case Error::UnknownSensor:
      return "UnknownSensor";
    case Error::BadAuthenticator:
      return "BadAuthenticator";
    case Error::AlreadyRegistered:
      return "AlreadyRegistered";
    case Error::IdError:
      return "IdError";
    case Error::NotAccepted:
      return "NotAccepted";
    case Error::UnknownEntity:
      return "UnknownEntity";
    case Error::NotFound:
      return "NotFound";
    case Error::ExistingState:
      return "ExistingState";
    case Error::DuplicateId:
      return "DuplicateId";
    case Error::IoError:
      return "IoError";
  }
  return "UnknownError";
}

}  // namespace wsnauth
