#include "hgauge/node.hpp"

#include "hgauge/error.hpp"

namespace hgauge {

Node::Node(std::string_view bits) : bits_(bits) {
  for (char c : bits_) {
    if (c != '0' && c != '1') throw InvalidArgument("node must be a bit string, got '" + bits_ + "'");
  }
}

Node Node::prefix(std::size_t n) const {
  Node out;
  out.bits_ = bits_.substr(0, n);
  return out;
}

Node Node::child(int bit) const {
  Node out = *this;
  out.push_back(bit);
  return out;
}

bool Node::is_prefix_of(const Node& other) const {
  return bits_.size() <= other.bits_.size() && other.bits_.compare(0, bits_.size(), bits_) == 0;
}

}  // namespace hgauge
