#pragma once

// Frozen output of tests/oracles/golden_oracle.py over the shared fixture.
// Regenerate with: python3 tests/oracles/golden_oracle.py

#include <array>
#include <string_view>

namespace golden {

inline constexpr std::array<std::string_view, 4> kEventDigests{
    "76f41caa04a1ec8f1299eb39d6ca657ca4dee6e68766f072b50abbf05d1ad92e",
    "2c6e16ed14ef3a687d4b6e5245c44966ed9f326b2460411d7a4261505a108ba9",
    "f54b8c010f049ad9517687718f1698655126b3975ced3d79dc7f799d24b7e835",
    "6ab7a67c14a9075d0b47474fe50adaf1e586e9511174daee627d071c3b505532",
};

inline constexpr std::array<std::string_view, 4> kChainValues{
    "f3986f6bf8dccbe98f5624136d1fab591314a5a21c3e43371fe2fc8e9258e4b6",
    "93dfc2c808a06bd721d9b1ecd9f93c46f2e729571b9dd2f9f49c3ad71c770324",
    "9fc337cbb88979ccadef04b09180e099a0365e3761c46ebfca54aa6fa6686024",
    "bfc5bd26718a0dda33e94d3921f99862e5b06386bf96eeb37e341dba556bc0bc",
};

// C_0 .. C_4 of the running ledger commitment over the four toy event
// records, with both signatures derived from the 0x07 key seed.
inline constexpr std::array<std::string_view, 5> kLedgerCommitments{
    "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d",
    "97d1edcc8b07ea44f1b904476b2ec0aed60a4195fc33293b69960c8a0e1cbf1b",
    "31587f08bebbaf2153f8c583f133e33f4856859a771a99b0dd54b99381d6ab4f",
    "7a9427df722d52663d20044f9312099cf55d0304148f9bc18a9b57355f8fd39c",
    "c184a6122cc49da7c5d9cd5ace004c72e62065285b0a749ae267f84712c9c6a0",
};

}  // namespace golden
