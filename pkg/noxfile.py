import nox


@nox.session
def cov(session):
    session.install(".[test]")
    session.run("pytest", "--cov=hodge_sigma", "--cov-report=html")


@nox.session
def tests(session):
    session.install(".[test]")
    session.run("pytest", *session.posargs)
