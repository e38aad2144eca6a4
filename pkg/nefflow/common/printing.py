import sys


class Colors:
    OKBLUE = "\033[94m"
    OKGREEN = "\033[92m"
    WARNING = "\033[93m"
    FAIL = "\033[91m"
    ENDC = "\033[0m"
    BOLD = "\033[1m"


# stdout carries command results only
def log(txt, c=Colors.ENDC, end=""):
    logn(txt, c=c, end=end)


def logn(txt, c=Colors.ENDC, end="\n"):
    print(c + str(txt) + Colors.ENDC, end=end, file=sys.stderr, flush=True)


def log_info(txt):
    logn(f"Info: {txt}", c=Colors.OKBLUE)


def log_success(txt):
    logn("\nWoohoo!", c=Colors.OKGREEN, end=" ")
    logn(txt)


def log_warning(txt):
    logn(f"Warning: {txt}", c=Colors.WARNING)


def log_error(txt):
    logn(f"Error: {txt}", c=Colors.FAIL)
