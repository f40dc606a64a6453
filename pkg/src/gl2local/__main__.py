from .cli import main

main(prog_name="gl2local")
