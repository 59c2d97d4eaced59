#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

namespace quadcore {

using VertexId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unordered pair {u, v} with u != v, stored canonically (u < v).
class Edge {
 public:
  Edge() = default;
  Edge(VertexId a, VertexId b) : u_(a < b ? a : b), v_(a < b ? b : a) {
    if (a == b) throw Error("edge endpoints must differ");
  }

  VertexId u() const { return u_; }
  VertexId v() const { return v_; }
  std::uint64_t key() const { return (std::uint64_t{u_} << 32) | v_; }
  bool has(VertexId x) const { return x == u_ || x == v_; }
  VertexId other(VertexId x) const { return x == u_ ? v_ : u_; }

  static Edge from_key(std::uint64_t key) {
    return Edge(static_cast<VertexId>(key >> 32), static_cast<VertexId>(key & 0xffffffffu));
  }

  auto operator<=>(const Edge&) const = default;

 private:
  VertexId u_ = 0;
  VertexId v_ = 1;
};

// An edge with a designated "center side" endpoint s; the other endpoint is v.
struct OrientedEdge {
  VertexId s = 0;
  VertexId v = 0;
  Edge edge() const { return Edge(s, v); }
  auto operator<=>(const OrientedEdge&) const = default;
};

enum class Answer : std::uint8_t { no = 0, yes = 1 };

constexpr Answer flip(Answer a) { return a == Answer::yes ? Answer::no : Answer::yes; }
constexpr Answer to_answer(bool b) { return b ? Answer::yes : Answer::no; }

}  // namespace quadcore

template <>
struct std::hash<quadcore::Edge> {
  std::size_t operator()(const quadcore::Edge& e) const noexcept {
    return std::hash<std::uint64_t>{}(e.key());
  }
};
