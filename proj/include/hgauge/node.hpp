#ifndef HGAUGE_NODE_HPP
#define HGAUGE_NODE_HPP

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>

namespace hgauge {

// A finite binary string, i.e. a node of the full binary tree and the name of
// the cylinder of all its infinite extensions.
class Node {
 public:
  Node() = default;
  // Throws InvalidArgument unless every character is '0' or '1'.
  explicit Node(std::string_view bits);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i] == '1' ? 1 : 0; }

  Node prefix(std::size_t n) const;
  Node child(int bit) const;
  void push_back(int bit) { bits_.push_back(bit ? '1' : '0'); }
  void pop_back() { bits_.pop_back(); }

  bool is_prefix_of(const Node& other) const;
  // Neither is a prefix of the other.
  bool incomparable_with(const Node& other) const { return !is_prefix_of(other) && !other.is_prefix_of(*this); }
  bool compatible_with(const Node& other) const { return !incomparable_with(other); }

  const std::string& str() const { return bits_; }

  friend bool operator==(const Node&, const Node&) = default;
  friend std::strong_ordering operator<=>(const Node& a, const Node& b) { return a.bits_ <=> b.bits_; }

 private:
  std::string bits_;
};

}  // namespace hgauge

#endif  // HGAUGE_NODE_HPP
