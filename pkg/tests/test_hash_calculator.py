"""
測試哈希計算器
"""

import pytest

from core.hash_calculator import HashCalculator


class TestHashCalculator:
    """測試 HashCalculator"""

    def test_calculate_from_bytes(self):
        data = b"Hello, World!"
        hash1 = HashCalculator.calculate(data)
        hash2 = HashCalculator.calculate(data)

        assert hash1 == hash2
        assert len(hash1) == 32  # MD5 為 32 位十六進位

    def test_str_equals_utf8_bytes(self):
        assert HashCalculator.calculate("√p0") == HashCalculator.calculate("√p0".encode("utf-8"))

    def test_dict_key_order_irrelevant(self):
        """標準形 JSON 與鍵的插入順序無關"""
        a = {"preset": "euclid:so3", "N": 3}
        b = {"N": 3, "preset": "euclid:so3"}
        assert HashCalculator.calculate(a) == HashCalculator.calculate(b)

    def test_canonical_compact(self):
        assert HashCalculator.canonical({"b": 1, "a": [1, 2]}) == b'{"a":[1,2],"b":1}'

    def test_unsupported_type(self):
        with pytest.raises(TypeError):
            HashCalculator.calculate(3.14)

    def test_content_key_depends_on_version(self):
        params = {"N": 3}
        assert HashCalculator.content_key("rules:euclid", params, "1") != \
            HashCalculator.content_key("rules:euclid", params, "2")
        assert HashCalculator.content_key("rules:euclid", params, "1") != \
            HashCalculator.content_key("rules:cross", params, "1")

    def test_compare_hashes(self):
        """大小寫不影響比較"""
        assert HashCalculator.compare("abc123def456", "ABC123DEF456") is True
        assert HashCalculator.compare("abc123def456", "xyz789") is False

    def test_different_data_different_hash(self):
        assert HashCalculator.calculate(b"Data 1") != HashCalculator.calculate(b"Data 2")


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
