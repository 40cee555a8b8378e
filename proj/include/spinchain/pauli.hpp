#pragma once
// Pauli letters, strings, and the 2×2 matrices. Strings enumerate in base-4
// with letter order I < X < Y < Z and site 0 as the most significant digit;
// every module that iterates or samples Pauli words uses this one ordering.

#include <cstdint>
#include <string>
#include <vector>

#include "spinchain/errors.hpp"
#include "spinchain/tensor.hpp"

namespace spinchain {

inline constexpr char kPauliLetters[5] = "IXYZ";

inline int pauli_code(char letter) {
    switch (letter) {
        case 'I': return 0;
        case 'X': return 1;
        case 'Y': return 2;
        case 'Z': return 3;
        default: throw dimension_error(std::string("invalid Pauli letter '") + letter + "'");
    }
}

struct PauliString {
    std::string letters;

    PauliString() = default;
    explicit PauliString(std::string l) : letters(std::move(l)) {
        for (char c : letters) pauli_code(c);  // validate
    }

    std::size_t size() const { return letters.size(); }
    int code(std::size_t site) const { return pauli_code(letters[site]); }

    static PauliString identity(std::size_t n) { return PauliString(std::string(n, 'I')); }

    // Base-4 word index, site 0 most significant.
    static PauliString from_index(std::uint64_t index, std::size_t n) {
        std::string out(n, 'I');
        for (std::size_t j = n; j-- > 0;) {
            out[j] = kPauliLetters[index & 3u];
            index >>= 2;
        }
        return PauliString(std::move(out));
    }

    std::uint64_t to_index() const {
        std::uint64_t idx = 0;
        for (char c : letters) idx = (idx << 2) | static_cast<std::uint64_t>(pauli_code(c));
        return idx;
    }

    bool operator==(const PauliString& other) const { return letters == other.letters; }
};

// 2×2 matrix of the Pauli operator with the given code (0=I,1=X,2=Y,3=Z).
inline DenseTensor pauli_matrix(int code) {
    DenseTensor m({2, 2});
    const cxd i(0.0, 1.0);
    switch (code) {
        case 0: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
        case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 2: m(0, 1) = -i;  m(1, 0) = i;   break;
        case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        default: throw dimension_error("invalid Pauli code");
    }
    return m;
}

inline DenseTensor pauli_matrix(char letter) { return pauli_matrix(pauli_code(letter)); }

}  // namespace spinchain
