"""
測試非交換多項式與字母表
"""

import pytest

from core.ncpoly import (
    Alphabet, Family, Letter, NCPoly, UnknownLetterError, commutator, product, word_from_pairs,
    word_pairs, word_text,
)
from core.scalar import ONE, equal, q, spow


@pytest.fixture(scope='module')
def alphabet():
    return Alphabet([
        Letter("x", Family.COORD, index=(1,), position=0),
        Letter("y", Family.COORD, index=(2,), position=1),
        Letter("L", Family.LPLUS, index=(1, 1), position=0, weight=3),
        Letter("r", Family.AUX, position=0, weight=1, inverse="r^-1"),
        Letter("r^-1", Family.AUX, position=1, weight=1, base="r"),
    ])


class TestAlphabet:

    def test_rank_follows_family(self, alphabet):
        """L 族排最前，其次 AUX、COORD"""
        assert alphabet.names() == ["L", "r", "r^-1", "x", "y"]

    def test_word_key_weight_first(self, alphabet):
        assert alphabet.word_key(("L",)) > alphabet.word_key(("y",))
        assert alphabet.word_key(("x", "x")) > alphabet.word_key(("L",))

    def test_word_key_lexicographic(self, alphabet):
        assert alphabet.word_key(("y", "x")) > alphabet.word_key(("x", "y"))

    def test_unknown_letter(self, alphabet):
        with pytest.raises(UnknownLetterError):
            alphabet["z"]

    def test_extended(self, alphabet):
        bigger = alphabet.extended([Letter("z", Family.DERIV)])
        assert "z" in bigger and "z" not in alphabet
        assert len(bigger) == len(alphabet) + 1

    def test_inverse_of(self, alphabet):
        assert alphabet.inverse_of("r") == "r^-1"
        assert alphabet.inverse_of("x") is None

    def test_letter_dict(self):
        letter = Letter("r", Family.AUX, position=2, weight=1, inverse="r^-1")
        assert Letter.from_dict(letter.to_dict()) == letter


class TestWordPairs:

    def test_merge_runs(self, alphabet):
        assert word_pairs(("x", "x", "y"), alphabet) == [["x", 2], ["y", 1]]

    def test_inverse_letters(self, alphabet):
        assert word_pairs(("r^-1", "r^-1", "x"), alphabet) == [["r", -2], ["x", 1]]

    def test_from_pairs(self, alphabet):
        assert word_from_pairs([["r", -2], ["x", 1]], alphabet) == ("r^-1", "r^-1", "x")

    def test_zero_exponent(self, alphabet):
        with pytest.raises(ValueError):
            word_from_pairs([["x", 0]], alphabet)

    def test_non_invertible(self, alphabet):
        with pytest.raises(ValueError):
            word_from_pairs([["x", -1]], alphabet)

    def test_word_text(self):
        assert word_text(()) == "1"
        assert word_text(("x", "y")) == "x·y"


class TestNCPoly:

    def test_cancellation(self):
        p = NCPoly.letter("x") - NCPoly.letter("x")
        assert p.is_zero()
        assert not p

    def test_noncommutative(self):
        x, y = NCPoly.letter("x"), NCPoly.letter("y")
        assert (x * y).coeff(("x", "y")) == ONE
        assert (x * y).coeff(("y", "x")) != ONE

    def test_scalar_multiplication(self):
        p = NCPoly.letter("x") * q
        assert equal(p.coeff(("x",)), q)
        assert (NCPoly.letter("x") * 0).is_zero()

    def test_constant(self):
        assert equal(NCPoly.const(3).constant(), ONE * 3)
        assert NCPoly.one().constant() == ONE

    def test_leading(self, alphabet):
        p = NCPoly({("x", "y"): ONE, ("y", "x"): q, ("L",): ONE})
        lead, c = p.leading(alphabet)
        assert lead == ("y", "x") and equal(c, q)

    def test_leading_of_zero(self, alphabet):
        with pytest.raises(ValueError):
            NCPoly().leading(alphabet)

    def test_commutator(self):
        x, y = NCPoly.letter("x"), NCPoly.letter("y")
        c = commutator(x, y, q)
        assert c.coeff(("x", "y")) == ONE
        assert equal(c.coeff(("y", "x")), -q)

    def test_product(self):
        x = NCPoly.letter("x")
        assert product(x, x, x).terms == {("x", "x", "x"): ONE}
        assert product().terms == NCPoly.one().terms

    def test_list_reload(self, alphabet):
        p = NCPoly({("r^-1", "x"): spow(3), ("y",): -ONE})
        assert NCPoly.from_list(p.to_list(alphabet), alphabet).terms == p.terms

    def test_text(self):
        assert NCPoly().text() == "0"
        long = NCPoly({("x",) * n: ONE for n in range(1, 9)})
        assert "+2" in long.text()


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
