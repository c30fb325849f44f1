import math

import numpy as np
import pytest

import rotbound as rb
from rotbound.rotations import (
    _exp_matrices,
    _random_rotation_matrices,
    _relative_angles,
)

PI = math.pi


def random_ball_vector(rng, max_norm=PI):
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return v * rng.uniform(0.0, max_norm)


class TestAngle:
    def test_accepts_range(self):
        assert float(rb.Angle(0.0)) == 0.0
        assert float(rb.Angle(PI)) == PI
        assert float(rb.Angle(1.5)) == 1.5

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            rb.Angle(-1e-9)
        with pytest.raises(ValueError):
            rb.Angle(PI + 1e-6)

    def test_folds_rounding_overshoot(self):
        # Arithmetic that lands epsilon past pi still constructs, capped at pi.
        assert float(rb.Angle(PI + 1e-13)) == PI

    def test_is_a_float(self):
        assert isinstance(rb.Angle(1.0), float)
        assert rb.Angle(1.0) + 0.5 == 1.5


class TestRotationMatrix:
    def test_identity(self):
        m = rb.RotationMatrix.identity()
        assert np.array_equal(m.m, np.eye(3))

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            rb.RotationMatrix(np.eye(4))

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError, match="orthonormal"):
            rb.RotationMatrix(np.eye(3) * 1.001)

    def test_rejects_reflection(self):
        m = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValueError, match="determinant"):
            rb.RotationMatrix(m)

    def test_tolerates_rounding_scale_error(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            m = _random_rotation_matrices(1, rng)[0]
            rb.RotationMatrix(m)

    def test_immutable(self):
        m = rb.RotationMatrix.identity()
        with pytest.raises(AttributeError):
            m.m = np.eye(3)
        with pytest.raises(ValueError):
            m.m[0, 0] = 2.0


class TestAxisAngle:
    def test_ball_boundary_allowed(self):
        r = rb.AxisAngle([PI, 0.0, 0.0])
        assert r.angle == PI

    def test_rejects_outside_ball(self):
        with pytest.raises(ValueError, match="exceeds pi"):
            rb.AxisAngle([PI + 1e-6, 0.0, 0.0])

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            rb.AxisAngle([1.0, 2.0])

    def test_negation(self):
        r = rb.AxisAngle([0.1, -0.2, 0.3])
        assert np.array_equal((-r).r, [-0.1, 0.2, -0.3])

    def test_immutable(self):
        r = rb.AxisAngle([0.1, 0.2, 0.3])
        with pytest.raises(AttributeError):
            r.r = np.zeros(3)


class TestExpMap:
    def test_zero_is_exact_identity(self):
        m = rb.exp_map(rb.AxisAngle([0.0, 0.0, 0.0]))
        assert np.array_equal(m.m, np.eye(3))

    def test_quarter_turn_about_x(self):
        m = rb.exp_map(rb.AxisAngle([PI / 2, 0.0, 0.0]))
        expected = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
        np.testing.assert_allclose(m.m, expected, atol=1e-15)

    def test_matches_batch_path(self):
        rng = np.random.default_rng(1)
        vs = np.stack([random_ball_vector(rng) for _ in range(200)])
        batch = _exp_matrices(vs)
        for v, bm in zip(vs, batch):
            np.testing.assert_allclose(rb.exp_map(rb.AxisAngle(v)).m, bm, atol=1e-13)


class TestLogMap:
    def test_identity_maps_to_zero(self):
        r = rb.log_map(rb.RotationMatrix.identity())
        assert np.array_equal(r.r, np.zeros(3))

    def test_round_trip_general(self):
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(1000):
            v = random_ball_vector(rng, PI - 1e-6)
            back = rb.log_map(rb.exp_map(rb.AxisAngle(v)))
            worst = max(worst, float(np.linalg.norm(back.r - v)))
        assert worst <= 1e-9

    def test_round_trip_near_pi_shell(self):
        # The regime where the skew part degenerates and axis recovery flips
        # to the symmetric-part method.
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(1000):
            v = rng.standard_normal(3)
            v = v / np.linalg.norm(v) * rng.uniform(PI - 1e-5, PI - 1e-6)
            back = rb.log_map(rb.exp_map(rb.AxisAngle(v)))
            worst = max(worst, float(np.linalg.norm(back.r - v)))
        assert worst <= 1e-9

    def test_round_trip_small_angles(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            v = rng.standard_normal(3)
            v = v / np.linalg.norm(v) * rng.uniform(0.0, 1e-4)
            back = rb.log_map(rb.exp_map(rb.AxisAngle(v)))
            assert np.linalg.norm(back.r - v) <= 1e-12

    def test_norm_matches_angle_of(self):
        # Internal consistency: the log's length is the trace angle to machine
        # precision. Below theta ~ 1e-4 the trace formula itself only pins the
        # angle to ~eps/theta, so the comparison is meaningful above that.
        rng = np.random.default_rng(5)
        for _ in range(300):
            m = rb.random_rotation(rng)
            assert abs(rb.log_map(m).angle - float(rb.angle_of(m))) <= 1e-12
        for theta in np.geomspace(1e-4, PI - 1e-9, 200):
            m = rb.exp_map(rb.AxisAngle([0.0, float(theta), 0.0]))
            assert abs(rb.log_map(m).angle - float(rb.angle_of(m))) <= 1e-12

    def test_half_turn_about_x(self):
        back = rb.log_map(rb.RotationMatrix(np.diag([1.0, -1.0, -1.0])))
        assert np.linalg.norm(back.r - [PI, 0.0, 0.0]) <= 1e-12

    def test_angle_pi_sign_canonical(self):
        # At exactly pi the axis sign is a free choice; the first nonzero
        # component comes back positive.
        for axis in ([0.0, 0.0, -1.0], [0.0, -1.0, 0.0], [-1.0, 0.0, 0.0]):
            m = rb.exp_map(rb.AxisAngle(np.array(axis) * PI))
            back = rb.log_map(m)
            nz = back.r[np.abs(back.r) > 1e-9]
            assert nz[0] > 0.0
            assert abs(back.angle - PI) <= 1e-9

    def test_angle_pi_mixed_axis(self):
        # At the ball boundary the trace pins the angle only to ~sqrt(eps),
        # so the recovered vector is good to ~1e-8, not the interior 1e-9.
        axis = np.array([0.6, -0.8, 0.0])
        m = rb.exp_map(rb.AxisAngle(axis * PI))
        back = rb.log_map(m)
        assert min(np.linalg.norm(back.r - axis * PI), np.linalg.norm(back.r + axis * PI)) <= 1e-7
        assert back.r[0] > 0.0


class TestAngleOf:
    def test_identity(self):
        assert float(rb.angle_of(rb.RotationMatrix.identity())) == 0.0

    @pytest.mark.parametrize("theta", [1e-8, 0.5, 1.0, 2.0, PI - 0.1, PI])
    def test_matches_construction_angle(self, theta):
        m = rb.exp_map(rb.AxisAngle([0.0, theta, 0.0]))
        assert abs(float(rb.angle_of(m)) - theta) <= 1e-7

    def test_returns_angle_type(self):
        assert isinstance(rb.angle_of(rb.RotationMatrix.identity()), rb.Angle)


class TestCompose:
    def test_applies_first_argument_first(self):
        rz = rb.exp_map(rb.AxisAngle([0.0, 0.0, PI / 2]))
        rx = rb.exp_map(rb.AxisAngle([PI / 2, 0.0, 0.0]))
        # x-hat -> (z-rotation) -> y-hat -> (x-rotation) -> z-hat
        v = rb.compose(rz, rx).m @ np.array([1.0, 0.0, 0.0])
        np.testing.assert_allclose(v, [0.0, 0.0, 1.0], atol=1e-15)

    def test_is_matrix_product_second_first(self):
        rng = np.random.default_rng(6)
        a = rb.random_rotation(rng)
        b = rb.random_rotation(rng)
        np.testing.assert_allclose(rb.compose(a, b).m, b.m @ a.m, atol=1e-15)

    def test_identity_neutral(self):
        r = rb.random_rotation(np.random.default_rng(60))
        assert np.abs(rb.compose(r, rb.RotationMatrix.identity()).m - r.m).max() == 0.0

    def test_inverse_pair_composes_to_identity(self):
        a = rb.exp_map(rb.AxisAngle([PI / 2, 0.0, 0.0]))
        b = rb.exp_map(rb.AxisAngle([-PI / 2, 0.0, 0.0]))
        assert np.abs(rb.compose(a, b).m - np.eye(3)).max() <= 1e-15

    def test_quarter_turns_compose_to_two_thirds_turn(self):
        rx = rb.exp_map(rb.AxisAngle([PI / 2, 0.0, 0.0]))
        rz = rb.exp_map(rb.AxisAngle([0.0, 0.0, PI / 2]))
        assert abs(float(rb.angle_of(rb.compose(rx, rz))) - 2.0 * PI / 3.0) <= 1e-12

    def test_product_order_shares_angle(self):
        rng = np.random.default_rng(61)
        for _ in range(300):
            a, b = rb.random_rotation(rng), rb.random_rotation(rng)
            ab = float(rb.angle_of(rb.compose(a, b)))
            ba = float(rb.angle_of(rb.compose(b, a)))
            assert abs(ab - ba) <= 1e-12


class TestInverse:
    def test_composes_to_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a = rb.random_rotation(rng)
            prod = rb.compose(a, rb.inverse(a))
            assert np.abs(prod.m - np.eye(3)).max() <= 1e-14

    def test_is_transpose(self):
        rng = np.random.default_rng(8)
        a = rb.random_rotation(rng)
        assert np.array_equal(rb.inverse(a).m, a.m.T)

    def test_matches_negated_axis_angle(self):
        r = rb.AxisAngle([0.4, -1.1, 0.7])
        assert np.abs(rb.inverse(rb.exp_map(r)).m - rb.exp_map(-r).m).max() <= 1e-12

    def test_involution_exact(self):
        a = rb.random_rotation(np.random.default_rng(80))
        assert np.array_equal(rb.inverse(rb.inverse(a)).m, a.m)


class TestAngularDistance:
    def test_self_distance_zero(self):
        rng = np.random.default_rng(9)
        a = rb.random_rotation(rng)
        assert float(rb.angular_distance(a, a)) == 0.0

    def test_coaxial_gap(self):
        a = rb.exp_map(rb.AxisAngle([2.0, 0.0, 0.0]))
        b = rb.exp_map(rb.AxisAngle([0.5, 0.0, 0.0]))
        assert abs(float(rb.angular_distance(a, b)) - 1.5) <= 1e-12

    def test_known_perpendicular_quarter_turns(self):
        a = rb.exp_map(rb.AxisAngle([PI / 2, 0.0, 0.0]))
        b = rb.exp_map(rb.AxisAngle([0.0, PI / 2, 0.0]))
        assert abs(float(rb.angular_distance(a, b)) - 2.0 * PI / 3.0) <= 1e-12

    def test_symmetry_exact(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            a = rb.random_rotation(rng)
            b = rb.random_rotation(rng)
            assert float(rb.angular_distance(a, b)) == float(rb.angular_distance(b, a))

    def test_triangle_inequality(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            a, b, c = (rb.random_rotation(rng) for _ in range(3))
            dac = float(rb.angular_distance(a, c))
            dab = float(rb.angular_distance(a, b))
            dbc = float(rb.angular_distance(b, c))
            assert dac <= dab + dbc + 1e-9

    def test_bi_invariance(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            a, b, s = (rb.random_rotation(rng) for _ in range(3))
            d = float(rb.angular_distance(a, b))
            left = float(rb.angular_distance(rb.compose(a, s), rb.compose(b, s)))
            right = float(rb.angular_distance(rb.compose(s, a), rb.compose(s, b)))
            assert abs(left - d) <= 1e-9
            assert abs(right - d) <= 1e-9

    def test_conjugation_preserves_angle(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            a, s = rb.random_rotation(rng), rb.random_rotation(rng)
            conj = rb.compose(rb.compose(rb.inverse(s), a), s)
            assert abs(float(rb.angle_of(conj)) - float(rb.angle_of(a))) <= 1e-9


class TestEnclosedAngle:
    def test_values(self):
        assert float(rb.enclosed_angle([1, 0, 0], [0, 1, 0])) == PI / 2
        assert float(rb.enclosed_angle([1, 0, 0], [1, 0, 0])) == 0.0
        assert float(rb.enclosed_angle([1, 0, 0], [-1, 0, 0])) == PI

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError, match="unit"):
            rb.enclosed_angle([1.1, 0, 0], [0, 1, 0])
        with pytest.raises(ValueError, match="unit"):
            rb.enclosed_angle([1, 0, 0], [0, 0.9, 0])


class TestRandomRotation:
    def test_deterministic_for_seed(self):
        a = rb.random_rotation(np.random.default_rng(42))
        b = rb.random_rotation(np.random.default_rng(42))
        assert np.array_equal(a.m, b.m)

    def test_valid_rotation(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            m = rb.random_rotation(rng).m
            assert np.abs(m.T @ m - np.eye(3)).max() <= 1e-12

    def test_uniform_angle_distribution(self):
        # Uniform measure on SO(3) has mean rotation angle pi/2 + 2/pi and
        # stdev sqrt(pi^2/12 - 4/pi^2); check the sample mean to 4 sigma.
        n = 100_000
        mats = _random_rotation_matrices(n, np.random.default_rng(15))
        angles = _relative_angles(mats, np.broadcast_to(np.eye(3), (n, 3, 3)))
        expect = PI / 2 + 2.0 / PI
        se = math.sqrt(PI * PI / 12.0 - 4.0 / (PI * PI)) / math.sqrt(n)
        assert abs(float(angles.mean()) - expect) <= 4.0 * se


class TestOrthonormalize:
    def test_recovers_perturbed_rotation(self):
        rng = np.random.default_rng(16)
        for _ in range(50):
            base = rb.random_rotation(rng).m
            noisy = base + rng.standard_normal((3, 3)) * 1e-4
            fixed = rb.orthonormalize(noisy)
            assert np.abs(fixed.m - base).max() <= 1e-3

    def test_fixed_point_on_clean_input(self):
        base = rb.random_rotation(np.random.default_rng(17))
        fixed = rb.orthonormalize(base.m)
        assert np.abs(fixed.m - base.m).max() <= 1e-14

    def test_rejects_reflection(self):
        with pytest.raises(ValueError, match="positive"):
            rb.orthonormalize(np.diag([1.0, 1.0, -1.0]))

    def test_rejects_singular(self):
        with pytest.raises(ValueError):
            rb.orthonormalize(np.zeros((3, 3)))


class TestTextFormat:
    def test_parse_axis_angle_line(self):
        r = rb.parse_rotation_line("0.1 -0.2 0.3")
        assert isinstance(r, rb.AxisAngle)
        np.testing.assert_array_equal(r.r, [0.1, -0.2, 0.3])

    def test_parse_matrix_line(self):
        fields = " ".join(str(v) for v in np.eye(3).reshape(-1))
        r = rb.parse_rotation_line(fields)
        assert isinstance(r, rb.RotationMatrix)
        assert np.array_equal(r.m, np.eye(3))

    def test_comments_and_blanks_skipped(self):
        text = "# heading\n\n0.1 0 0\n   # indented comment\n0 0.2 0\n"
        rots = rb.parse_rotations(text)
        assert len(rots) == 2

    def test_wrong_field_count_names_line(self):
        with pytest.raises(rb.RotationParseError, match="line 2") as info:
            rb.parse_rotations("0.1 0 0\n1 2 3 4\n")
        assert info.value.line_number == 2

    def test_non_numeric_token_names_line(self):
        with pytest.raises(rb.RotationParseError, match="line 1"):
            rb.parse_rotations("0.1 zero 0\n")

    def test_invalid_matrix_rejected_with_line(self):
        bad = " ".join(["2 0 0", "0 2 0", "0 0 2"])
        with pytest.raises(rb.RotationParseError, match="line 3"):
            rb.parse_rotations("# ok\n0.1 0 0\n" + bad + "\n")

    def test_out_of_ball_vector_rejected(self):
        with pytest.raises(rb.RotationParseError, match="exceeds pi"):
            rb.parse_rotation_line("4.0 0 0")

    def test_round_trip_is_exact(self):
        # 17 significant digits reproduce doubles bit for bit.
        rng = np.random.default_rng(18)
        for _ in range(100):
            v = random_ball_vector(rng)
            line = rb.format_rotation(rb.AxisAngle(v))
            back = rb.parse_rotation_line(line)
            assert np.array_equal(back.r, v)

    def test_matrix_round_trip_is_exact(self):
        m = rb.random_rotation(np.random.default_rng(19))
        back = rb.parse_rotation_line(rb.format_rotation(m))
        assert np.array_equal(back.m, m.m)

    def test_field_counts(self):
        assert len(rb.format_rotation(rb.AxisAngle([0.1, 0.2, 0.3])).split()) == 3
        assert len(rb.format_rotation(rb.RotationMatrix.identity()).split()) == 9


class TestAsMatrix:
    def test_passthrough_and_conversion(self):
        m = rb.RotationMatrix.identity()
        assert rb.as_matrix(m) is m
        r = rb.AxisAngle([0.3, 0.0, 0.0])
        assert np.array_equal(rb.as_matrix(r).m, rb.exp_map(r).m)

    def test_rejects_other_types(self):
        with pytest.raises(TypeError):
            rb.as_matrix(np.eye(3))
