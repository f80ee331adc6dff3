#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace deepspace {

using UserId = std::int64_t;
using ItemId = std::int64_t;

/// A (user, item) pair; the unit of the train/validation/test partition.
struct UserItem {
  UserId user = 0;
  ItemId item = 0;

  friend auto operator<=>(const UserItem&, const UserItem&) = default;
};

struct UserItemHash {
  std::size_t operator()(const UserItem& p) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(p.user) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(p.item) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NoSuchUser : public Error {
 public:
  explicit NoSuchUser(UserId user)
      : Error("no such user: " + std::to_string(user)), user_(user) {}
  UserId user() const noexcept { return user_; }

 private:
  UserId user_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

/// The user has no usable preference signal to learn a ranking from.
class CannotRank : public Error {
 public:
  using Error::Error;
};

/// McNemar with zero discordant pairs.
class UndefinedTest : public Error {
 public:
  using Error::Error;
};

}  // namespace deepspace
