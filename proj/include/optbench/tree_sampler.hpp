#pragma once

#include <string>
#include <vector>

#include "optbench/core.hpp"
#include "optbench/rng.hpp"

namespace optbench {

/// Preorder encoding of a full binary tree with n leaves: '1' per
/// internal node, '0' per leaf, length 2n-1. Every proper prefix has at
/// least as many '1's as '0's and the final bit is '0'.
struct BitSequence {
    std::string bits;

    std::size_t size() const { return bits.size(); }
};

/// Violations of the encoding invariants; empty = valid.
std::vector<std::string> validate_bit_sequence(const BitSequence& s);

/// A join ordering as the pair (sequence, permutation): the tree shape
/// plus the tables filling its leaf slots left to right.
struct JoinTreeEncoding {
    BitSequence sequence;
    std::vector<TableRef> permutation;
};

/// Unlabeled full binary tree with leaf slots numbered left to right
/// from 0. Same preorder storage convention as JoinTree.
struct TreeShape {
    struct Node {
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::int32_t leaf_slot = -1;  // leaves only

        bool is_leaf() const { return left < 0; }
    };

    std::vector<Node> nodes;

    int leaf_count() const;
};

/// Probability that the next encoding bit is a leaf ('0'), given r =
/// ones minus zeros emitted so far and k = bits still to generate:
///
///     P(r, k) = r * (k + r + 2) / (2 * k * (r + 1))
///
/// Flipping this biased coin bit by bit makes every tree shape equally
/// likely. Throws std::invalid_argument unless 0 <= r <= k and k >= 1.
double leaf_probability(int r, int k);

/// Random encoding for n leaves: 2(n-1) coin-driven bits plus the final
/// forced '0'. n = 1 yields the single-bit sequence "0".
BitSequence sample_bit_sequence(int n, Rng& rng);

/// The unique tree whose preorder traversal produced `s`. Throws
/// MalformedEncodingError on invalid input.
TreeShape decode(const BitSequence& s);

/// Preorder re-encoding; inverse of decode.
BitSequence encode(const TreeShape& t);

/// Random join ordering for a query: uniform shape via
/// sample_bit_sequence, then a uniform permutation of the query's
/// tables filling leaf slots left to right. Consumes the stream in that
/// order (bits first, then shuffle).
JoinTree sample_join_ordering(const JoinGraph& g, Rng& rng);

/// Places tables into a shape's leaf slots left to right.
JoinTree fill_leaves(const TreeShape& shape, const std::vector<TableRef>& permutation);

}  // namespace optbench
