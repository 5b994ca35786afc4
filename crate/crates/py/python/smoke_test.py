"""Smoke test for the mepack Python extension.

Run after `pip install --no-build-isolation -e crates/py`:

    python3 crates/py/python/smoke_test.py
"""

import math

import mepack


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # exact averages
    assert mepack.expectation("q*p") == "Q*P + i*dQ*dP/nu"
    assert mepack.expectation("q*p", hbar_form=True) == "Q*P + (1/2)*i*hbar"
    assert mepack.moment("(q - Q)^4") == "3*dQ^4"

    pk = mepack.PacketMoments(0.5, -1.0, 1.0, 1.5, hbar=1.0)
    assert close(pk.nu, 3.0)
    s = pk.entropy()
    nu = pk.nu
    want = (nu + 1) / 2 * math.log((nu + 1) / 2) - (nu - 1) / 2 * math.log((nu - 1) / 2)
    assert close(s, want), (s, want)
    assert close(mepack.entropy_quantum(1.0), 0.0)

    # symbolic and number-basis averages agree
    exact = mepack.expectation_numeric(pk, "p*q^2*p")
    fock = mepack.fock_expectation_numeric(pk, "p*q*q*p")
    assert abs(exact - fock) < 1e-8 * abs(exact), (exact, fock)

    # the leading quantum correction for a quartic truncation
    corr = mepack.corrections(mepack.Potential.symbolic(4), 5)
    assert list(corr) == [2], corr

    # free spreading and its number-basis counterpart
    free = mepack.Potential([0.0])
    rows = mepack.trajectory(mepack.PacketMoments(0, 0, 1, 1, hbar=1.0), free, [0.0, 1.0])
    assert rows[-1]["dQ"] == math.sqrt(2.0)
    osc = mepack.Potential.harmonic(1.0)
    a = mepack.evolve_quadratic_packet(pk, osc, 0.7)
    b = mepack.fock_evolve_packet(pk, osc, 0.7, cutoff=120)
    for x, y in [(a.q, b.q), (a.p, b.p), (a.dq, b.dq), (a.dp, b.dp)]:
        assert close(x, y, 1e-9), (a, b)

    # errors map to Python exceptions
    try:
        mepack.PacketMoments(0, 0, 0.1, 0.1, hbar=1.0).entropy()
    except ValueError as err:
        assert "uncertainty" in str(err) or "nu" in str(err), err
    else:
        raise AssertionError("packet below the uncertainty bound accepted")
    try:
        mepack.fock_expectation_numeric(mepack.PacketMoments(0, 0, 5, 5, hbar=1.0), "q*q", cutoff=20)
    except mepack.NumericalError:
        pass
    else:
        raise AssertionError("insufficient cutoff accepted")

    print("mepack smoke test: ok")


if __name__ == "__main__":
    main()
