"""Test suite for orowan_lab."""


def test_version():
    """Verify package exposes version."""
    import orowan_lab

    assert orowan_lab.__version__
