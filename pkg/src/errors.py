"""例外クラス定義

ライブラリ全体で送出する例外の階層を定義する。
プロトコルが「中断(Abort)」として定義している失敗は例外ではなく
IterationResult の値として返すため、ここには含めない。
"""


class OpaError(Exception):
    """全例外の基底クラス"""


class ParameterError(OpaError, ValueError):
    """パラメータ・次元・モジュラスの不整合"""


class MathError(OpaError, ArithmeticError):
    """逆元が存在しない等の算術エラー"""


class RangeError(OpaError, ValueError):
    """入力値がメッセージ空間・予算の範囲外"""


class ThresholdError(OpaError):
    """再構成に必要なシェア数が不足している"""


class DecodeError(OpaError, ValueError):
    """バイト列・群要素のデコード失敗"""


class DecryptionError(OpaError):
    """公開鍵暗号の復号失敗（鍵違い・関連データ改ざん）"""
