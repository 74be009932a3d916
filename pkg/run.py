from flask.cli import FlaskGroup

from mppa import create_app

cli = FlaskGroup(create_app=create_app, add_default_commands=False,
                 help="mPPA experiments, bounds and oracle suites.")

if __name__ == '__main__':
    cli()
