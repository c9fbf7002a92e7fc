import pytest
from gmpy2 import mpq

from sqzero.exactmat import Matrix
from sqzero.matio import (
    MatrixFileError,
    format_matrix,
    parse_matrix_file,
    parse_matrix_text,
    write_matrix_file,
)


class TestParse:
    def test_basic(self):
        m = parse_matrix_text("2 3\n1 2 3\n4 5 6\n")
        assert m == Matrix.from_rows([[1, 2, 3], [4, 5, 6]])

    def test_rationals_and_comments(self):
        text = "# a comment\n2 2\n1/2 -3\n# another\n0 7/4\n"
        m = parse_matrix_text(text)
        assert m[0, 0] == mpq(1, 2)
        assert m[0, 1] == -3
        assert m[1, 1] == mpq(7, 4)

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "2\n1 2\n3 4",
            "2 2\n1 2\n3",
            "2 2\n1 2\n3 4\n5 6",
            "1 1\n1/0",
            "1 1\n1.5",
            "1 1\nx",
            "1 2\n1 2/-3",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(MatrixFileError):
            parse_matrix_text(text)

    def test_missing_file(self):
        with pytest.raises(MatrixFileError):
            parse_matrix_file("/nonexistent/file.mat")


class TestRoundtrip:
    def test_parse_print_identity(self, tmp_path):
        m = Matrix.from_rows([["1/2", "0", "-7"], ["22/7", "3", "0"]])
        path = tmp_path / "m.mat"
        write_matrix_file(path, m)
        assert parse_matrix_file(path) == m

    def test_format_is_canonical(self):
        m = Matrix.from_rows([[mpq(2, 4), mpq(6, 3)]])
        assert format_matrix(m) == "1 2\n1/2 2\n"
